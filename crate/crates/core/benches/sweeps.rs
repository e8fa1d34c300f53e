use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use radial_toeplitz::berezin::{beta_profile, BerezinMethod, PolarGrid};
use radial_toeplitz::oracle::gram_matrix_quadrature;
use radial_toeplitz::spectral::{gamma_range, SpectralMethod};
use radial_toeplitz::{dsl, Execution, QuadratureConfig};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn gamma_sweep(c: &mut Criterion) {
    let eta =
        dsl::parse_measure("0.3*dirac(0.2) + jacobi(-0.5, 1) + poly([1, 0, 3], 0.2, 0.7)").unwrap();
    let cfg = QuadratureConfig::default();
    let mut group = c.benchmark_group("gamma_averages_1_to_256");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| gamma_range(&eta, 1..=256, SpectralMethod::Averages, &cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn berezin_sweep(c: &mut Criterion) {
    let eta = dsl::parse_measure("jacobi(0.5, 1) + 2*dirac(0.9)").unwrap();
    let cfg = QuadratureConfig::default();
    let grid: Vec<f64> = (0..128).map(|i| i as f64 / 129.0).collect();
    let mut group = c.benchmark_group("berezin_averages_128_points");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| beta_profile(&eta, &grid, BerezinMethod::Averages, &cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn gram_quadrature(c: &mut Criterion) {
    let eta = dsl::parse_measure("jacobi(1, 2) + poly([1, -1], 0, 0.5)").unwrap();
    let grid = PolarGrid::default();
    let mut group = c.benchmark_group("gram_quadrature_dim_32");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| gram_matrix_quadrature(&eta, 32, &grid, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, gamma_sweep, berezin_sweep, gram_quadrature);
criterion_main!(benches);
