//! Berezin transform of radial measures.
//!
//! For `ν_η` the transform depends on `|w|` only and equals
//!
//! ```text
//! β(a) = 2(1-a²)² ∫ (1 + a²r²) / (1 - a²r²)³ dη(r)
//!      = (1-a²)² Σ (n+1) a^{2n} γ(n)
//!      = 2(1-a²)² F(1) + 4a²(1-a²)² ∫₀¹ κ(r) (2 + a²r²)(1 - r²) r / (1 - a²r²)⁴ dr
//! ```
//!
//! [`berezin_disk_oracle`] integrates the defining kernel over the disk and
//! uses none of the above.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measure::{unit_pow, RadialMeasure};
use crate::quadrature::{integrate_panels, panel_breaks, Estimate, QuadratureConfig};
use crate::spectral::{gamma, kappa};

/// Largest `a` (and `|w|`) for which results are certified.
pub const CERTIFIED_LIMIT: f64 = 0.99;

/// Terms beyond which [`beta_series`] gives up.
pub const SERIES_HORIZON: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BerezinMethod {
    Direct,
    Series,
    Averages,
}

impl BerezinMethod {
    pub const ALL: [BerezinMethod; 3] = [Self::Direct, Self::Series, Self::Averages];

    pub fn name(self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::Series => "series",
            Self::Averages => "averages",
        }
    }
}

impl std::str::FromStr for BerezinMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown Berezin method '{s}'")))
    }
}

/// One evaluation of `β_η(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BerezinValue {
    pub a: f64,
    pub value: Complex64,
    /// Quadrature error estimate or series tail bound.
    pub error: f64,
    /// Series terms used; `None` for quadrature routes.
    pub terms: Option<usize>,
    /// False when `a` exceeds [`CERTIFIED_LIMIT`].
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerezinProfile {
    pub method: BerezinMethod,
    pub points: Vec<BerezinValue>,
}

impl BerezinProfile {
    pub fn sup_norm(&self) -> f64 {
        self.points
            .iter()
            .fold(0.0f64, |m, p| m.max(p.value.norm()))
    }
}

/// `{0, 0.05, …, 0.95, 0.99}`.
pub fn default_a_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
    g.push(0.99);
    g
}

fn check_a(a: f64) -> Result<()> {
    if a.is_finite() && (0.0..1.0).contains(&a) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "Berezin argument must lie in [0, 1), got {a}"
        )))
    }
}

/// `(1 + a²r²) / (1 - a²r²)³`.
pub fn beta_kernel(a: f64, r: f64) -> f64 {
    let t = a * a * r * r;
    (1.0 + t) / (1.0 - t).powi(3)
}

fn prefactor(a: f64) -> f64 {
    let s = 1.0 - a * a;
    s * s
}

/// `β_η(a)` from its defining integral; atoms exact, densities by panel quadrature.
pub fn beta_direct(eta: &RadialMeasure, a: f64, cfg: &QuadratureConfig) -> Result<BerezinValue> {
    check_a(a)?;
    let est = eta.integrate(|r| Complex64::new(beta_kernel(a, r), 0.0), 0.0, 1.0, cfg);
    let scale = 2.0 * prefactor(a);
    let scaled = Estimate {
        value: est.value * scale,
        error: est.error * scale,
    };
    cfg.accept(scaled)?;
    Ok(BerezinValue {
        a,
        value: scaled.value,
        error: scaled.error,
        terms: None,
        certified: a <= CERTIFIED_LIMIT,
    })
}

/// `Σ_{n > N} (n+1) x^n` in closed form.
fn weighted_geometric_tail(x: f64, horizon: usize) -> f64 {
    let n = horizon as f64;
    let p = unit_pow(x, n + 1.0);
    ((n + 2.0) * p - (n + 1.0) * p * x) / ((1.0 - x) * (1.0 - x))
}

/// `Σ_{n > N} (n+1) x^n (n/N)^s`, summed until the terms are negligible.
fn weighted_power_tail(x: f64, horizon: usize, s: f64) -> f64 {
    let nf = horizon as f64;
    let mut total = 0.0;
    let mut n = horizon + 1;
    loop {
        let m = n as f64;
        let term = (m + 1.0) * unit_pow(x, m) * (m / nf).powf(s);
        total += term;
        if term <= 1e-20 * total || term == 0.0 || n > horizon * 64 {
            return total;
        }
        n += 1;
    }
}

/// `β_η(a)` as `(1-a²)² Σ (n+1) a^{2n} γ(n)`, truncated once the tail bound
/// drops below `tol · (1 + |partial sum|)`.
///
/// The tail bound uses `max |γ|` over the last half of the computed range.
/// When `|γ|` still grows there, a power law `C·n^s` is fitted from the two
/// ends of that window and extrapolated; this is a heuristic.
pub fn beta_series(eta: &RadialMeasure, a: f64, tol: f64) -> Result<BerezinValue> {
    check_a(a)?;
    let x = a * a;
    let scale = prefactor(a);
    let mut gammas: Vec<Complex64> = Vec::new();
    let mut partial = Complex64::new(0.0, 0.0);
    let mut horizon = 64usize;
    let mut best = f64::INFINITY;
    loop {
        while gammas.len() <= horizon {
            let n = gammas.len();
            let g = gamma(eta, n as u64);
            partial += g * ((n as f64 + 1.0) * unit_pow(x, n as f64));
            gammas.push(g);
        }
        let window = &gammas[horizon / 2..=horizon];
        let sup = window.iter().fold(0.0f64, |m, g| m.max(g.norm()));
        let (g_mid, g_end) = (window[0].norm(), window[window.len() - 1].norm());
        let growth = if g_mid > 0.0 && g_end > g_mid {
            (g_end / g_mid).log2()
        } else {
            0.0
        };
        let tail = if x == 0.0 {
            0.0
        } else if growth <= 0.0 {
            scale * sup * weighted_geometric_tail(x, horizon)
        } else {
            scale * g_end * weighted_power_tail(x, horizon, growth)
        };
        best = best.min(tail);
        let value = partial * scale;
        if tail <= tol * (1.0 + value.norm()) {
            return Ok(BerezinValue {
                a,
                value,
                error: tail,
                terms: Some(horizon + 1),
                certified: a <= CERTIFIED_LIMIT,
            });
        }
        if horizon >= SERIES_HORIZON {
            return Err(Error::HorizonExceeded {
                horizon,
                best_bound: best,
            });
        }
        horizon *= 2;
    }
}

/// `β_η(a)` from the average function.
pub fn beta_via_averages(
    eta: &RadialMeasure,
    a: f64,
    cfg: &QuadratureConfig,
) -> Result<BerezinValue> {
    check_a(a)?;
    let scale = prefactor(a);
    let head = eta.total_mass() * (2.0 * scale);
    let a2 = a * a;
    let breaks = panel_breaks(0.0, 1.0, &eta.breakpoints(), cfg);
    let body = integrate_panels(
        |r| {
            let t = a2 * r * r;
            let weight = (2.0 + t) * (1.0 - r * r) * r / (1.0 - t).powi(4);
            kappa(eta, r).expect("panel nodes lie in [0, 1)") * weight
        },
        &breaks,
        cfg,
    );
    let factor = 4.0 * a2 * scale;
    let est = Estimate {
        value: head + body.value * factor,
        error: body.error * factor,
    };
    cfg.accept(est)?;
    Ok(BerezinValue {
        a,
        value: est.value,
        error: est.error,
        terms: None,
        certified: a <= CERTIFIED_LIMIT,
    })
}

/// Tail tolerance used by [`beta_profile`] for the series route.
pub const SERIES_TOL: f64 = 1e-13;

pub fn beta_eval(
    eta: &RadialMeasure,
    a: f64,
    method: BerezinMethod,
    cfg: &QuadratureConfig,
) -> Result<BerezinValue> {
    match method {
        BerezinMethod::Direct => beta_direct(eta, a, cfg),
        BerezinMethod::Series => beta_series(eta, a, SERIES_TOL),
        BerezinMethod::Averages => beta_via_averages(eta, a, cfg),
    }
}

/// `β_η` on a grid of `a` values.
pub fn beta_profile(
    eta: &RadialMeasure,
    grid: &[f64],
    method: BerezinMethod,
    cfg: &QuadratureConfig,
    exec: Execution,
) -> Result<BerezinProfile> {
    let points: Result<Vec<_>> = exec
        .map_slice(grid, |&a| beta_eval(eta, a, method, cfg))
        .into_iter()
        .collect();
    Ok(BerezinProfile {
        method,
        points: points?,
    })
}

/// `M`-point trapezoid value of `(1/2π) ∫ dθ / (1 - 2a cos θ + a²)²` and the
/// closed form `(1 + a²) / (1 - a²)³`.
pub fn circle_kernel_integral(a: f64, nodes: usize) -> Result<(f64, f64)> {
    check_a(a)?;
    if nodes < 4 {
        return Err(Error::domain(format!(
            "need at least 4 angular nodes, got {nodes}"
        )));
    }
    let m = nodes as f64;
    let a2 = a * a;
    let numeric = (0..nodes)
        .map(|j| {
            let d = 1.0 - 2.0 * a * (2.0 * PI * j as f64 / m).cos() + a2;
            1.0 / (d * d)
        })
        .sum::<f64>()
        / m;
    let closed = (1.0 + a2) / (1.0 - a2).powi(3);
    Ok((numeric, closed))
}

/// Discretization used by [`berezin_disk_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarGrid {
    pub radial: QuadratureConfig,
    /// Angular trapezoid nodes; `None` picks a count from the kernel's sharpness.
    pub angular: Option<usize>,
    /// Agreement required between successive angular doublings.
    pub angular_tol: f64,
}

impl Default for PolarGrid {
    fn default() -> Self {
        PolarGrid {
            radial: QuadratureConfig {
                split: 1,
                ..QuadratureConfig::default()
            },
            angular: None,
            angular_tol: 1e-12,
        }
    }
}

const MAX_ANGULAR: usize = 1 << 16;

/// `Ber_{ν_η}(w) = (1/π)(1-|w|²)² ∫_𝔻 |1 - z̄w|⁻⁴ dν_η(z)` by polar quadrature:
/// trapezoid in angle, the measure's own discretization in radius.
pub fn berezin_disk_oracle(
    eta: &RadialMeasure,
    w: Complex64,
    grid: &PolarGrid,
) -> Result<Estimate> {
    let modulus = w.norm();
    if !(modulus.is_finite() && modulus <= CERTIFIED_LIMIT) {
        return Err(Error::domain(format!(
            "disk oracle needs |w| <= {CERTIFIED_LIMIT}, got {modulus}"
        )));
    }
    let cfg = &grid.radial;
    let fine = eta.discretize(0.0, 1.0, cfg, 2 * cfg.split);
    let coarse = eta.discretize(0.0, 1.0, cfg, cfg.split);
    let prefactor = (1.0 - modulus * modulus).powi(2) / PI;
    let evaluate = |nodes: &[(f64, Complex64)], m: usize| -> Complex64 {
        let step = 2.0 * PI / m as f64;
        let angular: Vec<Complex64> = (0..m)
            .map(|l| Complex64::from_polar(1.0, step * l as f64))
            .collect();
        nodes
            .iter()
            .map(|&(r, weight)| {
                let ring: f64 = angular
                    .iter()
                    .map(|tau| {
                        let z = tau * r;
                        let d = (1.0 - z.conj() * w).norm_sqr();
                        1.0 / (d * d)
                    })
                    .sum();
                weight * (ring * step)
            })
            .sum::<Complex64>()
            * prefactor
    };
    let mut m = grid.angular.unwrap_or_else(|| {
        if modulus == 0.0 {
            16
        } else {
            2 * (40.0 / -modulus.ln()).ceil() as usize + 16
        }
    });
    let mut current = evaluate(&fine, m);
    let angular_err = loop {
        if grid.angular.is_some() {
            break 0.0;
        }
        let doubled = evaluate(&fine, 2 * m);
        let gap = (doubled - current).norm();
        m *= 2;
        current = doubled;
        if gap <= grid.angular_tol * (1.0 + current.norm()) {
            break gap;
        }
        if m >= MAX_ANGULAR {
            return Err(Error::NonConvergence {
                value: current.norm(),
                achieved: gap,
                target: grid.angular_tol,
            });
        }
    };
    let radial_err = (current - evaluate(&coarse, m)).norm();
    let est = Estimate {
        value: current,
        error: angular_err + radial_err,
    };
    cfg.accept(est)?;
    Ok(est)
}
