//! The acceptance suite: twelve end-to-end checks, each with a runtime budget.
//!
//! Every check compares against an independent route (closed forms, a second
//! formula, or a brute-force oracle) rather than against stored output.

use std::f64::consts::PI;
use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::berezin::{self, default_a_grid, BerezinMethod, PolarGrid};
use crate::carleson::{self, GridConfig, Verdict};
use crate::dsl::{self, DiagnosticKind};
use crate::error::{Error, Result};
use crate::measure::RadialMeasure;
use crate::oracle::{self, diagonal_report};
use crate::quadrature::QuadratureConfig;
use crate::spectral::{self, gamma, gamma_range, SpectralMethod};
use crate::tolerance::{close, mixed_gap};

/// The ten test measures: atoms, polynomial densities, Jacobi weights and complex combinations.
pub const SUITE: [&str; 10] = [
    "lebesgue",
    "dirac(0.5)",
    "dirac(0.9)",
    "poly([1])",
    "poly([1, 0, 3], 0.2, 0.7)",
    "jacobi(-0.5, 0)",
    "jacobi(1, 2)",
    "0.3*dirac(0) + 2*dirac(0.99)",
    "2*dirac(0.3) - 0.5i*lebesgue + 1+2i*jacobi(0.5, 1)",
    "poly([-1, 2]) + 0.5i*dirac(0.7)",
];

/// Seed for the parser fuzzing corpus.
pub const FUZZ_SEED: u64 = 0xF022_2013;
pub const FUZZ_CASES: usize = 100_000;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {} ({:.2} s of {} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

fn timed<F>(id: u8, name: &'static str, budget_secs: u64, check: F) -> CriterionOutcome
where
    F: FnOnce() -> Result<(bool, String)>,
{
    let budget = Duration::from_secs(budget_secs);
    let start = Instant::now();
    let result = panic::catch_unwind(AssertUnwindSafe(check));
    let elapsed = start.elapsed();
    let (ok, mut detail) = match result {
        Ok(Ok(pair)) => pair,
        Ok(Err(e)) => (false, format!("error: {e}")),
        Err(_) => (false, "panicked".to_string()),
    };
    let in_time = elapsed <= budget;
    if !in_time {
        detail.push_str("; over the runtime budget");
    }
    CriterionOutcome {
        id,
        name,
        passed: ok && in_time,
        detail,
        elapsed,
        budget,
    }
}

fn suite() -> Vec<(&'static str, RadialMeasure)> {
    SUITE
        .iter()
        .map(|s| (*s, dsl::parse_measure(s).expect("suite measures parse")))
        .collect()
}

/// Worst value and where it occurred.
#[derive(Default)]
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn record(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = at();
        }
    }
}

pub fn identity_measure() -> CriterionOutcome {
    timed(1, "identity measure", 1, || {
        let eta = RadialMeasure::lebesgue();
        let cfg = QuadratureConfig::default();
        let gammas = gamma_range(
            &eta,
            0..=500,
            SpectralMethod::Moments,
            &cfg,
            Default::default(),
        )?;
        let gamma_err = gammas
            .values
            .iter()
            .map(|g| (g - 1.0).norm())
            .fold(0.0, f64::max);
        let mut beta_err = 0.0f64;
        for method in BerezinMethod::ALL {
            let profile =
                berezin::beta_profile(&eta, &default_a_grid(), method, &cfg, Default::default())?;
            beta_err = profile
                .points
                .iter()
                .map(|p| (p.value - 1.0).norm())
                .fold(beta_err, f64::max);
        }
        let mut kappa_err = 0.0f64;
        for r in spectral::kappa_grid(&eta, 256, 40) {
            kappa_err = kappa_err.max((spectral::kappa(&eta, r)? - 1.0).norm());
        }
        let ok = gamma_err <= 1e-12 && beta_err <= 1e-8 && kappa_err <= 1e-12;
        Ok((
            ok,
            format!("max |γ-1| {gamma_err:.1e}, |β-1| {beta_err:.1e}, |κ-1| {kappa_err:.1e}"),
        ))
    })
}

pub fn dirac_closed_forms() -> CriterionOutcome {
    timed(2, "Dirac closed forms", 1, || {
        let cfg = QuadratureConfig::default();
        let mut gamma_worst = Worst::default();
        let mut beta_worst = Worst::default();
        for x in [0.1, 0.5, 0.9, 0.99] {
            let eta = RadialMeasure::dirac(x)?;
            for n in 0..=1000u64 {
                let expected = 2.0 * (n as f64 + 1.0) * (2.0 * n as f64 * x.ln()).exp();
                let got = gamma(&eta, n).re;
                // values below the normal range carry only absolute accuracy
                let rel =
                    (got - expected).abs() / expected.abs().max(got.abs()).max(f64::MIN_POSITIVE);
                gamma_worst.record(rel, || format!("x={x}, n={n}"));
            }
            for a in default_a_grid() {
                let t = a * a * x * x;
                let expected = 2.0 * (1.0 - a * a).powi(2) * (1.0 + t) / (1.0 - t).powi(3);
                let got = berezin::beta_direct(&eta, a, &cfg)?.value;
                beta_worst.record(mixed_gap(got, Complex64::new(expected, 0.0)), || {
                    format!("x={x}, a={a}")
                });
            }
        }
        let ok = gamma_worst.value <= 1e-12 && beta_worst.value <= 1e-12;
        Ok((
            ok,
            format!(
                "γ rel err {:.1e} ({}), β err {:.1e} ({})",
                gamma_worst.value, gamma_worst.at, beta_worst.value, beta_worst.at
            ),
        ))
    })
}

pub fn cross_formula_agreement() -> CriterionOutcome {
    timed(3, "cross-formula agreement", 30, || {
        let cfg = QuadratureConfig::default();
        let exec = Default::default();
        let mut gamma_worst = Worst::default();
        let mut beta_worst = Worst::default();
        for (label, eta) in suite() {
            let seqs = SpectralMethod::ALL
                .iter()
                .map(|&m| gamma_range(&eta, 1..=64, m, &cfg, exec))
                .collect::<Result<Vec<_>>>()?;
            for i in 0..seqs[0].values.len() {
                let (a, b, c) = (seqs[0].values[i], seqs[1].values[i], seqs[2].values[i]);
                let gap = mixed_gap(a, b).max(mixed_gap(a, c)).max(mixed_gap(b, c));
                gamma_worst.record(gap, || format!("{label}, n={}", i + 1));
            }
            let profiles = BerezinMethod::ALL
                .iter()
                .map(|&m| berezin::beta_profile(&eta, &default_a_grid(), m, &cfg, exec))
                .collect::<Result<Vec<_>>>()?;
            for i in 0..profiles[0].points.len() {
                let (a, b, c) = (
                    profiles[0].points[i],
                    profiles[1].points[i],
                    profiles[2].points[i],
                );
                let gap = mixed_gap(a.value, b.value)
                    .max(mixed_gap(a.value, c.value))
                    .max(mixed_gap(b.value, c.value));
                beta_worst.record(gap, || format!("{label}, a={}", a.a));
            }
        }
        let ok = gamma_worst.value <= 1e-8 && beta_worst.value <= 1e-8;
        Ok((
            ok,
            format!(
                "γ gap {:.1e} ({}), β gap {:.1e} ({})",
                gamma_worst.value, gamma_worst.at, beta_worst.value, beta_worst.at
            ),
        ))
    })
}

pub fn residue_lemma() -> CriterionOutcome {
    timed(4, "circle kernel residue", 1, || {
        let mut worst = Worst::default();
        for i in 0..10 {
            let a = i as f64 / 10.0;
            let (numeric, closed) = berezin::circle_kernel_integral(a, 512)?;
            worst.record(mixed_gap(numeric.into(), closed.into()), || {
                format!("a={a}")
            });
        }
        Ok((
            worst.value <= 1e-10,
            format!("max gap {:.1e} ({})", worst.value, worst.at),
        ))
    })
}

pub fn oracle_diagonality() -> CriterionOutcome {
    timed(5, "matrix oracle diagonality", 60, || {
        let cfg = QuadratureConfig::default();
        let exec = Default::default();
        let mut failures = Vec::new();
        let mut exact_worst = Worst::default();
        let mut quad_worst = Worst::default();
        let mut control_caught = true;
        for (label, eta) in suite() {
            let gammas = gamma_range(&eta, 0..=63, SpectralMethod::Moments, &cfg, exec)?;
            let op = oracle::gram_matrix(&eta, 64, 130)?;
            let report = diagonal_report(&op, &gammas, 1e-12, 1e-12)?;
            exact_worst.record(
                report.max_off_diagonal.max(report.max_diagonal_error),
                || label.to_string(),
            );
            if !report.pass {
                failures.push(format!("{label} (exact)"));
            }
            let mut corrupted = op.clone();
            corrupted.entries[(3, 7)] += Complex64::new(1e-6, 0.0);
            control_caught &= !diagonal_report(&corrupted, &gammas, 1e-12, 1e-12)?.pass;

            if !eta.has_atoms() {
                let op = oracle::gram_matrix_quadrature(&eta, 16, &PolarGrid::default(), exec)?;
                let report = diagonal_report(&op, &gammas, 1e-8, 1e-8)?;
                quad_worst.record(
                    report.max_off_diagonal.max(report.max_diagonal_error),
                    || label.to_string(),
                );
                if !report.pass {
                    failures.push(format!("{label} (quadrature)"));
                }
                let mut corrupted = op.clone();
                corrupted.entries[(2, 5)] += Complex64::new(0.0, 1e-5);
                control_caught &= !diagonal_report(&corrupted, &gammas, 1e-8, 1e-8)?.pass;
            }
        }
        let ok = failures.is_empty() && control_caught;
        Ok((
            ok,
            format!(
                "exact worst {:.1e} ({}), quadrature worst {:.1e} ({}), corrupted entry {}{}",
                exact_worst.value,
                exact_worst.at,
                quad_worst.value,
                quad_worst.at,
                if control_caught { "detected" } else { "missed" },
                if failures.is_empty() {
                    String::new()
                } else {
                    format!("; failed: {}", failures.join(", "))
                }
            ),
        ))
    })
}

pub fn disk_oracle_radiality() -> CriterionOutcome {
    timed(6, "disk oracle radiality", 30, || {
        let cfg = QuadratureConfig::default();
        let grid = PolarGrid::default();
        let mut spread_worst = Worst::default();
        let mut agree_worst = Worst::default();
        for (label, eta) in suite().into_iter().filter(|(_, e)| !e.has_atoms()) {
            for modulus in [0.3, 0.6, 0.9] {
                let values = (0..16)
                    .map(|l| {
                        let w = Complex64::from_polar(modulus, 2.0 * PI * l as f64 / 16.0);
                        berezin::berezin_disk_oracle(&eta, w, &grid).map(|e| e.value)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let spread = values
                    .iter()
                    .flat_map(|a| values.iter().map(move |b| (a - b).norm()))
                    .fold(0.0, f64::max);
                spread_worst.record(spread, || format!("{label}, |w|={modulus}"));
                let direct = berezin::beta_direct(&eta, modulus, &cfg)?.value;
                let gap = values
                    .iter()
                    .map(|v| (v - direct).norm())
                    .fold(0.0, f64::max);
                agree_worst.record(gap, || format!("{label}, |w|={modulus}"));
            }
        }
        let ok = spread_worst.value <= 1e-8 && agree_worst.value <= 1e-6;
        Ok((
            ok,
            format!(
                "angular spread {:.1e} ({}), gap to direct {:.1e} ({})",
                spread_worst.value, spread_worst.at, agree_worst.value, agree_worst.at
            ),
        ))
    })
}

pub fn norm_chain() -> CriterionOutcome {
    timed(7, "norm chain", 30, || {
        let grids = GridConfig::default();
        let mut checked = Vec::new();
        let mut failures = Vec::new();
        let mut slack = f64::NEG_INFINITY;
        for (label, eta) in suite().into_iter().filter(|(_, e)| e.is_positive()) {
            let analysis = carleson::carleson_report(&eta, &grids)?;
            let report = &analysis.report;
            if report.verdict != Verdict::Bounded {
                continue;
            }
            let s = report.chain_slack;
            slack = slack
                .max(s.beta_gamma)
                .max(s.gamma_kappa)
                .max(s.kappa_five_gamma);
            if !s.holds(1e-7) {
                failures.push(label);
            }
            checked.push(label);
        }
        let ok = failures.is_empty() && !checked.is_empty();
        Ok((
            ok,
            format!(
                "{} bounded positive measures, largest residual {slack:.3e}{}",
                checked.len(),
                if failures.is_empty() {
                    String::new()
                } else {
                    format!("; failed: {}", failures.join(", "))
                }
            ),
        ))
    })
}

pub fn m_of_s_lemma() -> CriterionOutcome {
    timed(8, "m(s) lower bound", 1, || {
        let mut worst = f64::INFINITY;
        let mut worst_at = 0.0;
        let points = 1000;
        for i in 0..points {
            let s = 0.75 + (0.999 - 0.75) * i as f64 / (points - 1) as f64;
            let v = carleson::m_of_s(s)?;
            if v.value < worst {
                worst = v.value;
                worst_at = s;
            }
        }
        let s = 0.75f64;
        let checkpoint = (1.0 - s * s) * 2.0 * s.powi(4);
        let exact = checkpoint == 567.0 / 2048.0 && checkpoint > 0.25;
        Ok((
            worst > 0.25 && exact,
            format!("min {worst:.6} at s={worst_at:.4}; checkpoint 567/2048 = {checkpoint}"),
        ))
    })
}

pub fn lipschitz_kernel() -> CriterionOutcome {
    timed(9, "Lipschitz kernel and modulus", 30, || {
        let mut kernel_worst = Worst::default();
        for n in 1..=50 {
            let gap =
                (spectral::lip_kernel_integral_numeric(n) - spectral::lip_kernel_integral(n)).abs();
            kernel_worst.record(gap, || format!("n={n}"));
        }
        let grids = GridConfig::default();
        let mut failures = Vec::new();
        let mut stepwise = f64::NEG_INFINITY;
        let mut ratio = 0.0f64;
        let mut count = 0;
        for (label, eta) in suite() {
            if carleson::carleson_report(&eta, &grids)?.verdict() != Verdict::Bounded {
                continue;
            }
            count += 1;
            let r = carleson::lipschitz_report(&eta, 2000, &grids)?;
            stepwise = stepwise.max(r.stepwise_residual);
            if r.bound > 0.0 {
                ratio = ratio.max(r.empirical_modulus / r.bound);
            }
            if !(r.stepwise_residual <= 1e-9 && r.empirical_modulus <= r.bound) {
                failures.push(label);
            }
        }
        let ok = kernel_worst.value <= 1e-9 && failures.is_empty() && count > 0;
        Ok((
            ok,
            format!(
                "kernel gap {:.1e} ({}); {count} bounded measures, stepwise residual {stepwise:.2e}, modulus/bound {ratio:.3}{}",
                kernel_worst.value,
                kernel_worst.at,
                if failures.is_empty() { String::new() } else { format!("; failed: {}", failures.join(", ")) }
            ),
        ))
    })
}

pub fn unbounded_detection() -> CriterionOutcome {
    timed(10, "unbounded detection", 5, || {
        let eta = dsl::parse_measure("jacobi(-0.5, 0)")?;
        let analysis = carleson::carleson_report(&eta, &GridConfig::default())?;
        let ratio = gamma(&eta, 1024).re / gamma(&eta, 512).re;
        let sqrt2 = 2f64.sqrt();
        let ok = analysis.verdict() == Verdict::Unbounded && ((ratio - sqrt2) / sqrt2).abs() <= 0.1;
        Ok((
            ok,
            format!(
                "verdict {}, γ(1024)/γ(512) = {ratio:.6}",
                analysis.verdict().name()
            ),
        ))
    })
}

/// A random input: raw bytes, or a soup of grammar fragments that gets deeper into the parser.
fn fuzz_input(rng: &mut ChaCha8Rng) -> String {
    const FRAGMENTS: [&str; 24] = [
        "dirac", "lebesgue", "poly", "jacobi", "i", "(", ")", "[", "]", ",", "+", "-", "*", "0.5",
        "1", "-1", "2e3", "1e999", ".", "e", " ", "\n", "0.99", "x",
    ];
    if rng.random_bool(0.3) {
        let len = rng.random_range(0..48);
        let bytes: Vec<u8> = (0..len).map(|_| rng.random()).collect();
        String::from_utf8_lossy(&bytes).into_owned()
    } else {
        let len = rng.random_range(0..24);
        (0..len)
            .map(|_| FRAGMENTS[rng.random_range(0..FRAGMENTS.len())])
            .collect()
    }
}

/// Inputs the parser must accept, beyond the suite.
pub const VALID_CORPUS: [&str; 8] = [
    "2*dirac(0.5) - 0.5i*poly([0,1])",
    "-dirac(0.25) + 3",
    "1-2i*(dirac(0.1) + jacobi(0, 0.5))",
    "poly([1e-3, -2.5e1, 7], 0, 0.125)",
    "-1.5*lebesgue - -0.5i*dirac(0)",
    "((lebesgue))",
    "0.1 + 0.2i",
    "dirac(0.3) +\n  dirac(0.3)",
];

pub fn parser_robustness() -> CriterionOutcome {
    timed(11, "parser totality and diagnostics", 30, || {
        let mut rng = ChaCha8Rng::seed_from_u64(FUZZ_SEED);
        let mut crashes = 0;
        let mut accepted = 0;
        for _ in 0..FUZZ_CASES {
            let input = fuzz_input(&mut rng);
            match panic::catch_unwind(|| dsl::parse(&input)) {
                Ok(Ok(_)) => accepted += 1,
                Ok(Err(diags)) => {
                    if diags.is_empty() {
                        crashes += 1;
                    }
                }
                Err(_) => crashes += 1,
            }
        }
        let mut round_trip_failures = Vec::new();
        for src in SUITE.iter().chain(VALID_CORPUS.iter()) {
            let first = dsl::parse(src).map_err(Error::Parse)?;
            let again = dsl::parse(&dsl::print(&first)).map_err(Error::Parse)?;
            if !first.same_structure(&again) {
                round_trip_failures.push(*src);
            }
        }
        let cases = [
            ("dirac(1.0)", 6, 3),
            ("dirac(2)", 6, 1),
            ("jacobi(-1,0)", 7, 2),
        ];
        let mut diagnostic_failures = Vec::new();
        for (src, offset, len) in cases {
            let err = dsl::parse_measure(src).err();
            let good = match &err {
                Some(e @ Error::Parse(diags)) => {
                    e.exit_code() == 2
                        && diags.len() == 1
                        && diags[0].kind == DiagnosticKind::Domain
                        && (diags[0].span.offset, diags[0].span.len) == (offset, len)
                }
                _ => false,
            };
            if !good {
                diagnostic_failures.push(src);
            }
        }
        let ok = crashes == 0 && round_trip_failures.is_empty() && diagnostic_failures.is_empty();
        Ok((
            ok,
            format!(
                "{FUZZ_CASES} fuzz inputs, {crashes} crashes, {accepted} accepted; round-trip failures {:?}; diagnostic failures {:?}",
                round_trip_failures, diagnostic_failures
            ),
        ))
    })
}

pub fn complex_linearity() -> CriterionOutcome {
    timed(12, "complex-measure linearity", 10, || {
        let parts = [
            dsl::parse_measure("poly([1, 0, 3], 0.2, 0.7)")?,
            dsl::parse_measure("dirac(0.5)")?,
            dsl::parse_measure("jacobi(1, 2)")?,
            dsl::parse_measure("0.3*dirac(0) + 2*dirac(0.99)")?,
        ];
        let weights = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ];
        let eta = RadialMeasure::combine(weights.iter().copied().zip(parts.iter()));
        let mut gamma_gap = 0.0f64;
        for n in 0..=500 {
            let combined: Complex64 = weights
                .iter()
                .zip(&parts)
                .map(|(w, p)| w * gamma(p, n))
                .sum();
            let direct = gamma(&eta, n);
            gamma_gap = gamma_gap.max(mixed_gap(direct, combined));
        }
        let dim = 32;
        let nodes = 2 * dim + 2;
        let whole = oracle::gram_matrix(&eta, dim, nodes)?.entries;
        let mut sum = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        for (w, p) in weights.iter().zip(&parts) {
            sum += oracle::gram_matrix(p, dim, nodes)?.entries * *w;
        }
        let matrix_gap = whole
            .iter()
            .zip(sum.iter())
            .map(|(a, b)| mixed_gap(*a, *b))
            .fold(0.0, f64::max);
        // the Jordan split of the combination recovers the same operator
        let jordan = eta.jordan_decompose()?.recombine();
        let jordan_ok = (0..=64).all(|n| close(gamma(&jordan, n), gamma(&eta, n), 1e-12));
        let ok = gamma_gap <= 1e-12 && matrix_gap <= 1e-12 && jordan_ok;
        Ok((
            ok,
            format!(
                "γ gap {gamma_gap:.1e}, Gram gap {matrix_gap:.1e}, Jordan recombination {}",
                if jordan_ok { "exact" } else { "off" }
            ),
        ))
    })
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        identity_measure(),
        dirac_closed_forms(),
        cross_formula_agreement(),
        residue_lemma(),
        oracle_diagonality(),
        disk_oracle_radiality(),
        norm_chain(),
        m_of_s_lemma(),
        lipschitz_kernel(),
        unbounded_detection(),
        parser_robustness(),
        complex_linearity(),
    ]
}
