//! Finite sections of `T_μ` in the canonical basis `b_k(z) = sqrt((k+1)/π) z^k`,
//! assembled without assuming the operator is diagonal.
//!
//! Both construction paths evaluate the angular integral numerically, so a
//! wrong radial factorization would show up as nonzero off-diagonal entries.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::berezin::PolarGrid;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measure::RadialMeasure;
use crate::output::format_number;
use crate::spectral::SpectralSequence;

/// Largest dimension accepted by [`gram_matrix_quadrature`].
pub const QUADRATURE_MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GramPath {
    PolarExact,
    PolarQuadrature,
}

/// `A[j][k] = ⟨T_μ b_j, b_k⟩` for `j, k < N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub entries: DMatrix<Complex64>,
    pub path: GramPath,
    pub angular_nodes: usize,
}

impl TruncatedOperator {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                worst = worst.max((self.entries[(j, k)] - self.entries[(k, j)].conj()).norm());
            }
        }
        worst
    }

    /// Row-major CSV with one `re,im` pair per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|k| {
                    let z = self.entries[(j, k)];
                    format!("{},{}", format_number(z.re), format_number(z.im))
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// `b_k(z) = sqrt((k+1)/π) z^k`.
pub fn basis_eval(k: u32, z: Complex64) -> Complex64 {
    z.powu(k) * ((k as f64 + 1.0) / PI).sqrt()
}

/// `(2π/M) Σ_l e^{i m θ_l}`, the `M`-point trapezoid value of `∫_𝕋 τ^m dθ`.
pub fn trapezoid_fourier(m: i64, nodes: usize) -> Complex64 {
    let modulus = nodes as i64;
    let step = 2.0 * PI / nodes as f64;
    (0..modulus)
        .map(|l| {
            let phase = (m * l).rem_euclid(modulus) as f64 * step;
            Complex64::from_polar(1.0, phase)
        })
        .sum::<Complex64>()
        * step
}

fn check_dims(dim: usize, nodes: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::domain("operator dimension must be at least 1"));
    }
    if nodes < 2 * dim + 2 {
        return Err(Error::domain(format!(
            "{nodes} angular nodes alias frequencies up to {}; need at least {}",
            dim - 1,
            2 * dim + 2
        )));
    }
    Ok(())
}

/// Gram matrix from exact moments and a numerical angular factor:
/// `A[j][k] = sqrt((j+1)(k+1))/π · ∫ r^{j+k} dη · C_{j-k}`.
pub fn gram_matrix(eta: &RadialMeasure, dim: usize, nodes: usize) -> Result<TruncatedOperator> {
    check_dims(dim, nodes)?;
    let fourier: Vec<Complex64> = (0..2 * dim - 1)
        .map(|i| trapezoid_fourier(i as i64 - (dim as i64 - 1), nodes))
        .collect();
    let moments: Vec<Complex64> = (0..2 * dim - 1).map(|k| eta.moment(k as u64)).collect();
    let entries = DMatrix::from_fn(dim, dim, |j, k| {
        let norm = (((j + 1) * (k + 1)) as f64).sqrt() / PI;
        moments[j + k] * fourier[j + dim - 1 - k] * norm
    });
    Ok(TruncatedOperator {
        entries,
        path: GramPath::PolarExact,
        angular_nodes: nodes,
    })
}

/// Gram matrix by two-dimensional polar quadrature of `b_j(z) conj(b_k(z))`
/// against `ν_η`. Atoms are rejected; use [`gram_matrix`] for those.
pub fn gram_matrix_quadrature(
    eta: &RadialMeasure,
    dim: usize,
    grid: &PolarGrid,
    exec: Execution,
) -> Result<TruncatedOperator> {
    if eta.has_atoms() {
        return Err(Error::domain("the quadrature path accepts densities only"));
    }
    if dim > QUADRATURE_MAX_DIM {
        return Err(Error::domain(format!(
            "quadrature path supports dim <= {QUADRATURE_MAX_DIM}"
        )));
    }
    let nodes = grid.angular.unwrap_or(2 * dim + 2);
    check_dims(dim, nodes)?;
    let cfg = &grid.radial;
    let assemble = |split: usize| -> DMatrix<Complex64> {
        let radial = eta.discretize(0.0, 1.0, cfg, split);
        let step = 2.0 * PI / nodes as f64;
        let norms: Vec<f64> = (0..dim).map(|k| ((k as f64 + 1.0) / PI).sqrt()).collect();
        let partials = exec.map_slice(&radial, |&(r, weight)| {
            let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
            let mut basis = vec![Complex64::new(0.0, 0.0); dim];
            for l in 0..nodes {
                let z = Complex64::from_polar(r, step * l as f64);
                let mut power = Complex64::new(1.0, 0.0);
                for (k, b) in basis.iter_mut().enumerate() {
                    *b = power * norms[k];
                    power *= z;
                }
                for j in 0..dim {
                    for k in 0..dim {
                        acc[(j, k)] += basis[j] * basis[k].conj();
                    }
                }
            }
            acc * (weight * step)
        });
        partials
            .into_iter()
            .fold(DMatrix::zeros(dim, dim), |sum, part| sum + part)
    };
    let fine = assemble(2 * cfg.split);
    let coarse = assemble(cfg.split);
    let defect = (&fine - &coarse)
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    let scale = fine.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if defect > cfg.tolerance * (1.0 + scale) {
        return Err(Error::NonConvergence {
            value: scale,
            achieved: defect,
            target: cfg.tolerance,
        });
    }
    Ok(TruncatedOperator {
        entries: fine,
        path: GramPath::PolarQuadrature,
        angular_nodes: nodes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalReport {
    pub dim: usize,
    pub max_off_diagonal: f64,
    pub worst_off_diagonal: (usize, usize),
    pub max_diagonal_error: f64,
    pub worst_diagonal: usize,
    pub off_diagonal_tol: f64,
    pub diagonal_tol: f64,
    pub pass: bool,
}

/// Compares `A` with `diag(γ)`: off-diagonals against `off_tol · (1 + max|A_kk|)`,
/// diagonal entries against `diag_tol · (1 + |γ(k)|)`.
pub fn diagonal_report(
    op: &TruncatedOperator,
    gamma: &SpectralSequence,
    off_tol: f64,
    diag_tol: f64,
) -> Result<DiagonalReport> {
    let n = op.dim();
    if gamma.start != 0 || gamma.values.len() < n {
        return Err(Error::domain(format!(
            "need γ(0..{n}) to compare a {n}x{n} section"
        )));
    }
    let a = &op.entries;
    let max_diag = (0..n).fold(0.0f64, |m, k| m.max(a[(k, k)].norm()));
    let mut max_off = 0.0;
    let mut worst_off = (0, 0);
    let mut max_diag_err = 0.0;
    let mut worst_diag = 0;
    let mut diag_ok = true;
    for j in 0..n {
        for k in 0..n {
            if j == k {
                let g = gamma.values[k];
                let err = (a[(k, k)] - g).norm();
                diag_ok &= err <= diag_tol * (1.0 + g.norm());
                if err > max_diag_err {
                    max_diag_err = err;
                    worst_diag = k;
                }
            } else if a[(j, k)].norm() > max_off {
                max_off = a[(j, k)].norm();
                worst_off = (j, k);
            }
        }
    }
    Ok(DiagonalReport {
        dim: n,
        max_off_diagonal: max_off,
        worst_off_diagonal: worst_off,
        max_diagonal_error: max_diag_err,
        worst_diagonal: worst_diag,
        off_diagonal_tol: off_tol,
        diagonal_tol: diag_tol,
        pass: diag_ok && max_off <= off_tol * (1.0 + max_diag),
    })
}

/// `max_s ‖D_{τ^s} A - A D_{τ^s}‖_max` for `s = 1..=count`, where
/// `D_τ = diag(τ^{-j})` is the rotation `f(z) ↦ f(τ̄ z)` on the section.
pub fn rotation_commutation(op: &TruncatedOperator, tau: Complex64, count: usize) -> f64 {
    let n = op.dim();
    let unit = tau / tau.norm();
    let mut worst = 0.0f64;
    let mut sample = unit;
    for _ in 0..count {
        let inv = sample.inv();
        let diag: Vec<Complex64> = (0..n).map(|j| inv.powu(j as u32)).collect();
        for j in 0..n {
            for k in 0..n {
                let commutator = (diag[j] - diag[k]) * op.entries[(j, k)];
                worst = worst.max(commutator.norm());
            }
        }
        sample *= unit;
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasurePrimitive;
    use crate::quadrature::QuadratureConfig;
    use crate::spectral::{gamma_range, SpectralMethod};

    fn seq(eta: &RadialMeasure, n: usize) -> SpectralSequence {
        gamma_range(
            eta,
            0..=n as u64 - 1,
            SpectralMethod::Moments,
            &QuadratureConfig::default(),
            Execution::Sequential,
        )
        .unwrap()
    }

    #[test]
    fn basis_examples() {
        let z = Complex64::new(0.3, -0.7);
        assert!((basis_eval(0, z).re - 1.0 / PI.sqrt()).abs() < 1e-16);
        assert!((basis_eval(1, Complex64::new(0.5, 0.0)).re - 0.398_94).abs() < 1e-5);
    }

    #[test]
    fn basis_is_normalized() {
        // ∫_𝔻 |b_k|² dA by polar quadrature
        let cfg = QuadratureConfig::default();
        let eta0 = RadialMeasure::lebesgue();
        for k in [0u32, 1, 5, 30] {
            let m = 64;
            let step = 2.0 * PI / m as f64;
            let est = eta0.integrate(
                |r| {
                    let ring: f64 = (0..m)
                        .map(|l| {
                            basis_eval(k, Complex64::from_polar(r, step * l as f64)).norm_sqr()
                        })
                        .sum();
                    Complex64::new(ring * step, 0.0)
                },
                0.0,
                1.0,
                &cfg,
            );
            assert!((est.value.re - 1.0).abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn identity_section() {
        let op = gram_matrix(&RadialMeasure::lebesgue(), 8, 18).unwrap();
        let id = DMatrix::<Complex64>::identity(8, 8);
        assert!((&op.entries - id).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn dirac_section() {
        let d = RadialMeasure::dirac(0.5).unwrap();
        let op = gram_matrix(&d, 8, 18).unwrap();
        for k in 0..8 {
            let want = 2.0 * (k as f64 + 1.0) * 0.25f64.powi(k as i32);
            assert!((op.entries[(k, k)].re - want).abs() < 1e-12);
        }
        let r = diagonal_report(&op, &seq(&d, 8), 1e-12, 1e-12).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn aliasing_is_rejected() {
        assert!(gram_matrix(&RadialMeasure::lebesgue(), 8, 17).is_err());
        assert!(gram_matrix(&RadialMeasure::lebesgue(), 0, 17).is_err());
    }

    #[test]
    fn corrupted_entry_is_detected() {
        let eta = RadialMeasure::lebesgue();
        let mut op = gram_matrix(&eta, 8, 18).unwrap();
        op.entries[(2, 5)] = Complex64::new(1e-3, 0.0);
        let r = diagonal_report(&op, &seq(&eta, 8), 1e-12, 1e-12).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_off_diagonal, (2, 5));
        let tau = Complex64::from_polar(1.0, PI / 7.0);
        assert!(rotation_commutation(&op, tau, 1) > 1e-5);
    }

    #[test]
    fn identity_commutes_with_rotations() {
        let op = gram_matrix(&RadialMeasure::lebesgue(), 8, 18).unwrap();
        assert!(rotation_commutation(&op, Complex64::from_polar(1.0, 0.3), 8) < 1e-14);
    }

    #[test]
    fn quadrature_path_examples() {
        let grid = PolarGrid::default();
        let op = gram_matrix_quadrature(&RadialMeasure::lebesgue(), 16, &grid, Execution::Parallel)
            .unwrap();
        let id = DMatrix::<Complex64>::identity(16, 16);
        assert!((&op.entries - id).iter().all(|z| z.norm() < 1e-9));

        let flat =
            RadialMeasure::from_primitive(MeasurePrimitive::poly(vec![1.0], 0.0, 1.0).unwrap());
        let op = gram_matrix_quadrature(&flat, 8, &grid, Execution::Parallel).unwrap();
        for k in 0..8 {
            let want = 2.0 * (k as f64 + 1.0) / (2.0 * k as f64 + 1.0);
            assert!((op.entries[(k, k)].re - want).abs() < 1e-9);
        }

        let jac = RadialMeasure::from_primitive(MeasurePrimitive::jacobi(1.0, 0.0).unwrap());
        let quad = gram_matrix_quadrature(&jac, 8, &grid, Execution::Parallel).unwrap();
        let exact = gram_matrix(&jac, 8, 18).unwrap();
        assert!((&quad.entries - &exact.entries)
            .iter()
            .all(|z| z.norm() < 1e-8));
        assert!(gram_matrix_quadrature(
            &RadialMeasure::dirac(0.5).unwrap(),
            4,
            &grid,
            Execution::Parallel
        )
        .is_err());
    }

    #[test]
    fn csv_dump_shape() {
        let op = gram_matrix(&RadialMeasure::lebesgue(), 2, 6).unwrap();
        let csv = op.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), 4);
    }
}
