//! Boundedness criterion for radial Toeplitz operators, the norm-equivalence
//! chain `‖β‖ ≤ ‖γ‖ ≤ ‖κ‖ ≤ 5‖γ‖`, and the Lipschitz property of `γ` in the
//! logarithmic metric.
//!
//! Suprema are sampled: `κ` on a uniform grid plus the ladder `1 - 2^-j`,
//! `γ` up to a finite horizon, `β` on an `a`-grid. Whether `κ` is bounded is
//! decided heuristically from its behaviour on the last ten ladder levels.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::berezin::{beta_profile, default_a_grid, BerezinMethod};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measure::RadialMeasure;
use crate::quadrature::QuadratureConfig;
use crate::spectral::{gamma, gamma_range, kappa, kappa_grid, lip_kernel_integral, SpectralMethod};

/// Seed for the random pairs sampled by [`lipschitz_report`].
pub const LIPSCHITZ_SEED: u64 = 0x1A9_2013;
pub const LIPSCHITZ_RANDOM_PAIRS: usize = 10_000;

/// Ladder levels compared by the boundedness heuristic.
const DECADE: u32 = 10;
const STABLE_RATIO: f64 = 1.05;
const GROWTH_FACTOR: f64 = 10.0;

/// `|log(m+1) - log(n+1)|`.
pub fn d_log(m: u64, n: u64) -> f64 {
    ((m as f64).ln_1p() - (n as f64).ln_1p()).abs()
}

/// `(1/(m+1), log(m+1) - log m)`; the first never exceeds the second.
pub fn log_gap_bound(m: u64) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::domain("log gap bound needs m >= 1"));
    }
    let mf = m as f64;
    Ok((1.0 / (mf + 1.0), (1.0 / mf).ln_1p()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MOfS {
    pub s: f64,
    pub m: u64,
    /// `(1 - s²)(m + 1) s^{2m}`.
    pub value: f64,
    /// `value > 1/4`.
    pub holds: bool,
}

/// `m = ⌊1 / (2(1 - s))⌋` and the quantity `(1 - s²)(m+1) s^{2m}` that exceeds 1/4.
pub fn m_of_s(s: f64) -> Result<MOfS> {
    if !(s.is_finite() && (0.75..1.0).contains(&s)) {
        return Err(Error::domain(format!("m(s) needs s in [3/4, 1), got {s}")));
    }
    let m = (1.0 / (2.0 * (1.0 - s))).floor();
    let value = (1.0 - s * s) * (m + 1.0) * (2.0 * m * s.ln()).exp();
    Ok(MOfS {
        s,
        m: m as u64,
        value,
        holds: value > 0.25,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    /// Largest `n` for `γ`.
    pub horizon: u64,
    /// Uniform `κ` samples on `[0, 1)`.
    pub uniform: usize,
    /// Ladder levels `r_j = 1 - 2^-j`, `j ≤ geometric_levels`.
    pub geometric_levels: u32,
    pub a_grid: Vec<f64>,
    pub quadrature: QuadratureConfig,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            horizon: 4096,
            uniform: 256,
            geometric_levels: 40,
            a_grid: default_a_grid(),
            quadrature: QuadratureConfig::default(),
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Bounded,
    Unbounded,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Bounded => "bounded",
            Verdict::Unbounded => "unbounded",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Residuals of the sampled chain; each is `≤ 0` when the inequality holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainSlack {
    /// `sup β - sup γ`
    pub beta_gamma: f64,
    /// `sup γ - sup κ`
    pub gamma_kappa: f64,
    /// `sup κ - 5 sup γ`
    pub kappa_five_gamma: f64,
}

impl ChainSlack {
    pub fn holds(&self, tol: f64) -> bool {
        self.beta_gamma <= tol && self.gamma_kappa <= tol && self.kappa_five_gamma <= tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaScan {
    pub sup: f64,
    pub sup_at: f64,
    /// `|κ(r_40)| / |κ(r_30)|` on the ladder (0 when both vanish).
    pub growth_ratio: f64,
    /// `|κ|` non-decreasing over the last ten ladder levels.
    pub monotone_tail: bool,
    /// `|κ(r_J)|` at the deepest ladder level.
    pub last_level: f64,
}

fn scan_kappa(eta: &RadialMeasure, grids: &GridConfig) -> KappaScan {
    let grid = kappa_grid(eta, grids.uniform, grids.geometric_levels);
    let values = grids
        .exec
        .map_slice(&grid, |&r| kappa(eta, r).map(|k| k.norm()).unwrap_or(0.0));
    let (sup_at, sup) =
        grid.iter().zip(&values).fold(
            (0.0, 0.0f64),
            |best, (&r, &v)| if v > best.1 { (r, v) } else { best },
        );
    let levels = grids.geometric_levels;
    let first = levels.saturating_sub(DECADE);
    let ladder: Vec<f64> = (first..=levels)
        .map(|j| {
            kappa(eta, 1.0 - 2f64.powi(-(j as i32)))
                .map(|k| k.norm())
                .unwrap_or(0.0)
        })
        .collect();
    let (start, end) = (ladder[0], ladder[ladder.len() - 1]);
    let growth_ratio = if end <= f64::MIN_POSITIVE {
        0.0
    } else if start <= f64::MIN_POSITIVE {
        f64::INFINITY
    } else {
        end / start
    };
    let monotone_tail = ladder.windows(2).all(|w| w[1] >= w[0]);
    KappaScan {
        sup,
        sup_at,
        growth_ratio,
        monotone_tail,
        last_level: end,
    }
}

fn classify(scan: &KappaScan, gamma_sup: f64) -> Verdict {
    if scan.growth_ratio < STABLE_RATIO {
        Verdict::Bounded
    } else if scan.monotone_tail && scan.last_level > GROWTH_FACTOR * gamma_sup {
        Verdict::Unbounded
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlesonReport {
    pub measure: String,
    pub positive: bool,
    pub kappa: KappaScan,
    pub gamma_sup: f64,
    pub gamma_sup_at: u64,
    pub horizon: u64,
    pub beta_sup: f64,
    pub chain_slack: ChainSlack,
    /// `max (|κ(s)| - 4|γ(m(s))|)` over grid points `s ≥ 3/4`.
    pub constant4_residual: f64,
    pub verdict: Verdict,
}

impl CarlesonReport {
    /// Whether the sampled chain holds, when it is expected to (positive, bounded).
    pub fn chain_ok(&self, tol: f64) -> bool {
        !(self.positive && self.verdict == Verdict::Bounded) || self.chain_slack.holds(tol)
    }
}

/// Report for `η` itself plus, for non-positive `η`, each nonzero Jordan part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlesonAnalysis {
    pub report: CarlesonReport,
    pub parts: Vec<(String, CarlesonReport)>,
}

impl CarlesonAnalysis {
    pub fn verdict(&self) -> Verdict {
        if self.parts.is_empty() {
            return self.report.verdict;
        }
        if self
            .parts
            .iter()
            .all(|(_, r)| r.verdict == Verdict::Bounded)
        {
            Verdict::Bounded
        } else {
            self.report.verdict
        }
    }

    pub fn chain_ok(&self, tol: f64) -> bool {
        self.report.chain_ok(tol) && self.parts.iter().all(|(_, r)| r.chain_ok(tol))
    }
}

fn single_report(eta: &RadialMeasure, grids: &GridConfig) -> Result<CarlesonReport> {
    let scan = scan_kappa(eta, grids);
    let gammas = gamma_range(
        eta,
        0..=grids.horizon,
        SpectralMethod::Moments,
        &grids.quadrature,
        grids.exec,
    )?;
    let (gamma_sup_at, gamma_sup) = gammas
        .indices()
        .zip(gammas.values.iter().map(|g| g.norm()))
        .fold(
            (0, 0.0f64),
            |best, (n, v)| if v > best.1 { (n, v) } else { best },
        );
    let betas = beta_profile(
        eta,
        &grids.a_grid,
        BerezinMethod::Direct,
        &grids.quadrature,
        grids.exec,
    )?;
    let beta_sup = betas.sup_norm();
    let chain_slack = ChainSlack {
        beta_gamma: beta_sup - gamma_sup,
        gamma_kappa: gamma_sup - scan.sup,
        kappa_five_gamma: scan.sup - 5.0 * gamma_sup,
    };
    let constant4_residual = kappa_grid(eta, grids.uniform, grids.geometric_levels)
        .into_iter()
        .filter(|&s| s >= 0.75)
        .map(|s| {
            let m = m_of_s(s).expect("s in [3/4, 1)").m;
            kappa(eta, s).map(|k| k.norm()).unwrap_or(0.0) - 4.0 * gamma(eta, m).norm()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CarlesonReport {
        measure: eta.to_string(),
        positive: eta.is_positive(),
        verdict: classify(&scan, gamma_sup),
        kappa: scan,
        gamma_sup,
        gamma_sup_at,
        horizon: grids.horizon,
        beta_sup,
        chain_slack,
        constant4_residual,
    })
}

const PART_LABELS: [&str; 4] = ["eta1", "eta2", "eta3", "eta4"];

/// Samples `κ`, `γ` and `β` and classifies `η` as bounded, unbounded or inconclusive.
pub fn carleson_report(eta: &RadialMeasure, grids: &GridConfig) -> Result<CarlesonAnalysis> {
    let report = single_report(eta, grids)?;
    let mut parts = Vec::new();
    if !eta.is_positive() {
        let jordan = eta.jordan_decompose()?;
        for (label, part) in PART_LABELS.iter().zip(jordan.as_array()) {
            if !part.is_zero() {
                parts.push((label.to_string(), single_report(part, grids)?));
            }
        }
    }
    Ok(CarlesonAnalysis { report, parts })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub measure: String,
    pub horizon: u64,
    /// Sampled `sup κ`, summed over Jordan parts for non-positive measures.
    pub kappa_sup: f64,
    pub empirical_modulus: f64,
    pub worst_pair: (u64, u64),
    /// `8 · kappa_sup`; infinite when `κ` is not judged bounded.
    pub bound: f64,
    /// `max_n |γ(n+1) - γ(n)| - 8 κ_sup (log(n+2) - log(n+1))`.
    pub stepwise_residual: f64,
    /// `max_{n≥1} |γ(n+1) - γ(n)| - κ_sup ∫|L(n+1,·) - L(n,·)|`.
    pub kernel_residual: f64,
    pub applicable: bool,
    pub pass: bool,
}

/// Empirical `d_log`-Lipschitz modulus of `γ` on `0..=horizon` against `8 sup κ`.
pub fn lipschitz_report(
    eta: &RadialMeasure,
    horizon: u64,
    grids: &GridConfig,
) -> Result<LipschitzReport> {
    if horizon == 0 {
        return Err(Error::domain(
            "Lipschitz report needs a horizon of at least 1",
        ));
    }
    let pieces: Vec<RadialMeasure> = if eta.is_positive() {
        vec![eta.clone()]
    } else {
        eta.jordan_decompose()?
            .as_array()
            .into_iter()
            .filter(|m| !m.is_zero())
            .cloned()
            .collect()
    };
    let mut kappa_sup = 0.0;
    let mut applicable = true;
    for piece in &pieces {
        let scan = scan_kappa(piece, grids);
        let g_sup = gamma_range(
            piece,
            0..=horizon.min(grids.horizon),
            SpectralMethod::Moments,
            &grids.quadrature,
            grids.exec,
        )?
        .sup_norm();
        applicable &= classify(&scan, g_sup) == Verdict::Bounded;
        kappa_sup += scan.sup;
    }
    let gammas: Vec<Complex64> = gamma_range(
        eta,
        0..=horizon,
        SpectralMethod::Moments,
        &grids.quadrature,
        grids.exec,
    )?
    .values;
    let ratio = |m: u64, n: u64| (gammas[m as usize] - gammas[n as usize]).norm() / d_log(m, n);

    let mut empirical_modulus = 0.0;
    let mut worst_pair = (0, 1);
    let mut stepwise_residual = f64::NEG_INFINITY;
    let mut kernel_residual = f64::NEG_INFINITY;
    for n in 0..horizon {
        let step = (gammas[n as usize + 1] - gammas[n as usize]).norm();
        let q = step / d_log(n + 1, n);
        if q > empirical_modulus {
            empirical_modulus = q;
            worst_pair = (n, n + 1);
        }
        stepwise_residual = stepwise_residual.max(step - 8.0 * kappa_sup * d_log(n + 1, n));
        if n >= 1 {
            kernel_residual = kernel_residual.max(step - kappa_sup * lip_kernel_integral(n));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(LIPSCHITZ_SEED);
    for _ in 0..LIPSCHITZ_RANDOM_PAIRS {
        let m = rng.random_range(0..=horizon);
        let n = rng.random_range(0..=horizon);
        if m == n {
            continue;
        }
        let q = ratio(m, n);
        if q > empirical_modulus {
            empirical_modulus = q;
            worst_pair = (m.min(n), m.max(n));
        }
    }
    let bound = if applicable {
        8.0 * kappa_sup
    } else {
        f64::INFINITY
    };
    Ok(LipschitzReport {
        measure: eta.to_string(),
        horizon,
        kappa_sup,
        empirical_modulus,
        worst_pair,
        bound,
        stepwise_residual,
        kernel_residual,
        applicable,
        pass: empirical_modulus <= bound * (1.0 + 1e-9),
    })
}
