//! The eigenvalue sequence `γ_η`, the average function `κ_η`, and the
//! integration-by-parts routes that connect them.
//!
//! ```text
//! γ(n) = 2(n+1) ∫ r^{2n} dη
//!      = 2(n+1) η([0,1)) - 4n(n+1) ∫₀¹ F(r) r^{2n-1} dr
//!      = 2n(n+1) ∫₀¹ κ(r) r^{2n-1} (1 - r²) dr          (n ≥ 1)
//! κ(r) = 2 η([r,1)) / (1 - r²)
//! ```

use std::ops::RangeInclusive;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measure::{unit_pow, RadialMeasure};
use crate::quadrature::{integrate_panels, panel_breaks, Estimate, QuadratureConfig};
use crate::tolerance::{close, QUADRATURE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralMethod {
    Moments,
    Distribution,
    Averages,
}

impl SpectralMethod {
    pub const ALL: [SpectralMethod; 3] = [Self::Moments, Self::Distribution, Self::Averages];

    pub fn name(self) -> &'static str {
        match self {
            Self::Moments => "moments",
            Self::Distribution => "distribution",
            Self::Averages => "averages",
        }
    }
}

impl std::str::FromStr for SpectralMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown spectral method '{s}'")))
    }
}

/// `γ_η(n)` for `n` in `start..=start + values.len() - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSequence {
    pub start: u64,
    pub values: Vec<Complex64>,
    pub method: SpectralMethod,
    /// The generating measure in DSL syntax.
    pub measure: String,
}

impl SpectralSequence {
    pub fn get(&self, n: u64) -> Option<Complex64> {
        n.checked_sub(self.start)
            .and_then(|i| self.values.get(i as usize).copied())
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.values.len() as u64).map(move |i| self.start + i)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }
}

/// `γ_η(n) = 2(n+1) ∫ r^{2n} dη`.
pub fn gamma(eta: &RadialMeasure, n: u64) -> Complex64 {
    eta.moment_real_order(2.0 * n as f64) * (2.0 * (n as f64 + 1.0))
}

/// `γ_η(0) = 2 η([0,1))`.
pub fn gamma0(eta: &RadialMeasure) -> Complex64 {
    eta.total_mass() * 2.0
}

/// `κ_η(r) = 2 η([r,1)) / (1 - r²)`.
pub fn kappa(eta: &RadialMeasure, r: f64) -> Result<Complex64> {
    let tail = eta.tail_mass(r)?;
    Ok(tail * (2.0 / ((1.0 - r) * (1.0 + r))))
}

/// `γ_η(n)` from the distribution function. `n = 0` returns `gamma0` exactly.
pub fn gamma_via_distribution(
    eta: &RadialMeasure,
    n: u64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    if n == 0 {
        return Ok(Estimate::exact(gamma0(eta)));
    }
    let nf = n as f64;
    let breaks = panel_breaks(0.0, 1.0, &eta.breakpoints(), cfg);
    let integral = integrate_panels(
        |r| eta.distribution(r).0 * unit_pow(r, 2.0 * nf - 1.0),
        &breaks,
        cfg,
    );
    let factor = 4.0 * nf * (nf + 1.0);
    let est = Estimate {
        value: eta.total_mass() * (2.0 * (nf + 1.0)) - integral.value * factor,
        error: integral.error * factor,
    };
    cfg.accept(est)?;
    Ok(est)
}

/// `γ_η(n)` from the average function. `n = 0` returns `gamma0` exactly.
pub fn gamma_via_averages(eta: &RadialMeasure, n: u64, cfg: &QuadratureConfig) -> Result<Estimate> {
    if n == 0 {
        return Ok(Estimate::exact(gamma0(eta)));
    }
    let kernel = LipschitzKernel::new(n);
    let breaks = panel_breaks(0.0, 1.0, &eta.breakpoints(), cfg);
    let est = integrate_panels(
        |r| {
            let k = kappa(eta, r).expect("panel nodes lie in [0, 1)");
            k * kernel.value(r)
        },
        &breaks,
        cfg,
    );
    cfg.accept(est)?;
    Ok(est)
}

/// `γ_η(n)` for `n` in `range`, each entry computed independently.
pub fn gamma_range(
    eta: &RadialMeasure,
    range: RangeInclusive<u64>,
    method: SpectralMethod,
    cfg: &QuadratureConfig,
    exec: Execution,
) -> Result<SpectralSequence> {
    let start = *range.start();
    let len = range.end().saturating_sub(start) as usize + usize::from(!range.is_empty());
    let values: Result<Vec<Complex64>> = exec
        .map_range(0..len, |i| {
            let n = start + i as u64;
            match method {
                SpectralMethod::Moments => Ok(gamma(eta, n)),
                SpectralMethod::Distribution => {
                    gamma_via_distribution(eta, n, cfg).map(|e| e.value)
                }
                SpectralMethod::Averages => gamma_via_averages(eta, n, cfg).map(|e| e.value),
            }
        })
        .into_iter()
        .collect();
    Ok(SpectralSequence {
        start,
        values: values?,
        method,
        measure: eta.to_string(),
    })
}

/// The three evaluations of `∫_{[0,u)} f dη` performed by [`integrate_by_parts`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartsEvaluation {
    pub direct: Complex64,
    pub distribution: Complex64,
    /// Only available for `u = 1`.
    pub averages: Option<Complex64>,
}

/// `∫_{[0,u)} f dη` directly, via `F_η`, and (for `u = 1`) via `κ_η`.
///
/// Fails with [`Error::Verification`] when the routes disagree beyond `1e-8`.
pub fn integrate_by_parts<F, D>(
    eta: &RadialMeasure,
    f: F,
    f_prime: D,
    u: f64,
    cfg: &QuadratureConfig,
) -> Result<PartsEvaluation>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::domain(format!(
            "integration limit must lie in (0, 1], got {u}"
        )));
    }
    let direct = eta
        .integrate(|r| Complex64::new(f(r), 0.0), 0.0, u, cfg)
        .value;
    let breaks = panel_breaks(0.0, u, &eta.breakpoints(), cfg);
    let f_left = eta.distribution(u).1;
    let by_distribution = f_left * f(u)
        - integrate_panels(|r| eta.distribution(r).0 * f_prime(r), &breaks, cfg).value;
    let by_averages = if u == 1.0 {
        let head = eta.total_mass() * f(0.0);
        let body = integrate_panels(
            |r| {
                kappa(eta, r).expect("panel nodes lie in [0, 1)")
                    * (0.5 * (1.0 - r * r) * f_prime(r))
            },
            &breaks,
            cfg,
        );
        Some(head + body.value)
    } else {
        None
    };
    let eval = PartsEvaluation {
        direct,
        distribution: by_distribution,
        averages: by_averages,
    };
    let agree = close(direct, by_distribution, QUADRATURE_TOL)
        && by_averages.is_none_or(|a| close(direct, a, QUADRATURE_TOL));
    if !agree {
        let mut values = vec![direct.re, direct.im, by_distribution.re, by_distribution.im];
        if let Some(a) = by_averages {
            values.extend([a.re, a.im]);
        }
        return Err(Error::Verification {
            what: "integration by parts routes disagree".into(),
            values,
        });
    }
    Ok(eval)
}

/// Sample points for `κ_η`: a uniform grid, the ladder `1 - 2^-j`, and the
/// measure's own breakpoints (where `κ` may attain its supremum).
pub fn kappa_grid(eta: &RadialMeasure, uniform: usize, geometric_levels: u32) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..uniform.max(1))
        .map(|i| i as f64 / uniform.max(1) as f64)
        .collect();
    pts.extend((0..=geometric_levels).map(|j| 1.0 - 2f64.powi(-(j as i32))));
    pts.extend(eta.breakpoints().into_iter().filter(|&x| x < 1.0));
    pts.retain(|x| (0.0..1.0).contains(x));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `r ↦ κ_η(r)` with a lazily computed supremum estimate on [`kappa_grid`].
#[derive(Debug)]
pub struct AverageFunction<'a> {
    measure: &'a RadialMeasure,
    sup: OnceLock<f64>,
}

impl<'a> AverageFunction<'a> {
    pub fn new(measure: &'a RadialMeasure) -> Self {
        AverageFunction {
            measure,
            sup: OnceLock::new(),
        }
    }

    pub fn eval(&self, r: f64) -> Result<Complex64> {
        kappa(self.measure, r)
    }

    /// `max |κ|` over the default grid (256 uniform points, 40 geometric levels).
    pub fn sup_estimate(&self) -> f64 {
        *self.sup.get_or_init(|| {
            kappa_grid(self.measure, 256, 40)
                .into_iter()
                .map(|r| kappa(self.measure, r).map(|k| k.norm()).unwrap_or(0.0))
                .fold(0.0, f64::max)
        })
    }
}

/// `L(n, r) = 2n(n+1) r^{2n-1} (1 - r²)`, the kernel in the averages formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LipschitzKernel {
    pub n: u64,
}

impl LipschitzKernel {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "the kernel is defined for n >= 1");
        LipschitzKernel { n }
    }

    pub fn value(&self, r: f64) -> f64 {
        let n = self.n as f64;
        2.0 * n * (n + 1.0) * unit_pow(r, 2.0 * n - 1.0) * (1.0 - r * r)
    }

    /// `L̃(n, x) = ∫₀ˣ L(n, r) dr = (n+1) x^{2n} - n x^{2n+2}`.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let n = self.n as f64;
        let p = unit_pow(x, 2.0 * n);
        (n + 1.0) * p - n * p * x * x
    }

    /// Crossing point of `L(n, ·)` and `L(n+1, ·)`: `sqrt(n / (n + 2))`.
    pub fn crossing(&self) -> f64 {
        let n = self.n as f64;
        (n / (n + 2.0)).sqrt()
    }
}

/// `∫₀¹ |L(n+1, r) - L(n, r)| dr = 8(n+1) nⁿ / (n+2)^{n+2}`, evaluated in log space.
pub fn lip_kernel_integral(n: u64) -> f64 {
    assert!(n >= 1, "defined for n >= 1");
    let n = n as f64;
    (8f64.ln() + (n + 1.0).ln() + n * n.ln() - (n + 2.0) * (n + 2.0).ln()).exp()
}

/// Quadrature of `|L(n+1, ·) - L(n, ·)|`, split at the crossing point.
pub fn lip_kernel_integral_numeric(n: u64) -> f64 {
    let lo = LipschitzKernel::new(n);
    let hi = LipschitzKernel::new(n + 1);
    let cfg = QuadratureConfig::default();
    let breaks = panel_breaks(0.0, 1.0, &[lo.crossing()], &cfg);
    integrate_panels(
        |r| Complex64::new((hi.value(r) - lo.value(r)).abs(), 0.0),
        &breaks,
        &cfg,
    )
    .value
    .re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasurePrimitive;

    fn eta0() -> RadialMeasure {
        RadialMeasure::lebesgue()
    }

    fn jacobi(p: f64, q: f64) -> RadialMeasure {
        RadialMeasure::from_primitive(MeasurePrimitive::jacobi(p, q).unwrap())
    }

    #[test]
    fn gamma_examples() {
        for n in [0, 1, 7, 100] {
            assert!((gamma(&eta0(), n).re - 1.0).abs() < 1e-14);
        }
        let d = RadialMeasure::dirac(0.5).unwrap();
        assert_eq!(gamma(&d, 3).re, 0.125);
        assert!((gamma(&jacobi(-0.5, 0.0), 1).re - 64.0 / 15.0).abs() < 1e-13);
    }

    #[test]
    fn kappa_examples() {
        assert!((kappa(&eta0(), 0.37).unwrap().re - 1.0).abs() < 1e-15);
        let d = RadialMeasure::dirac(0.6).unwrap();
        assert!((kappa(&d, 0.6).unwrap().re - 2.0 / 0.64).abs() < 1e-15);
        assert_eq!(kappa(&d, 0.61).unwrap().re, 0.0);
        let k = kappa(&jacobi(-0.5, 0.0), 1.0 - 1e-4).unwrap().re;
        assert!((k / 200.0 - 1.0).abs() < 0.01, "{k}");
        assert!(kappa(&d, 1.0).is_err());
    }

    #[test]
    fn gamma0_four_ways() {
        for m in [eta0(), RadialMeasure::dirac(0.2).unwrap(), jacobi(1.0, 2.0)] {
            let g0 = gamma0(&m);
            assert!((g0 - gamma(&m, 0)).norm() < 1e-15);
            assert!((g0 - m.distribution(1.0).0 * 2.0).norm() < 1e-15);
            assert!((g0 - kappa(&m, 0.0).unwrap()).norm() < 1e-14);
        }
        let i_eta0 = eta0().scaled(Complex64::new(0.0, 1.0));
        assert!((gamma0(&i_eta0) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(gamma0(&RadialMeasure::dirac(0.3).unwrap()).re, 2.0);
    }

    #[test]
    fn quadrature_routes_examples() {
        let cfg = QuadratureConfig::default();
        assert!((gamma_via_distribution(&eta0(), 1, &cfg).unwrap().value.re - 1.0).abs() < 1e-10);
        let d = RadialMeasure::dirac(0.5).unwrap();
        assert!((gamma_via_distribution(&d, 2, &cfg).unwrap().value.re - 0.375).abs() < 1e-10);
        assert!((gamma_via_averages(&eta0(), 3, &cfg).unwrap().value.re - 1.0).abs() < 1e-10);
        assert!((gamma_via_averages(&d, 1, &cfg).unwrap().value.re - 1.0).abs() < 1e-9);
        assert_eq!(gamma_via_averages(&d, 0, &cfg).unwrap().value, gamma0(&d));
    }

    #[test]
    fn integration_by_parts_examples() {
        let cfg = QuadratureConfig::default();
        let m = jacobi(0.5, 1.0);
        let one = integrate_by_parts(&m, |_| 1.0, |_| 0.0, 1.0, &cfg).unwrap();
        assert!((one.direct - m.total_mass()).norm() < 1e-12);
        let n = 4u64;
        let ev = integrate_by_parts(&m, |r| r.powi(8), |r| 8.0 * r.powi(7), 1.0, &cfg).unwrap();
        assert!((ev.direct - gamma(&m, n) / 10.0).norm() < 1e-12);
        let d = RadialMeasure::dirac(0.5).unwrap();
        let ev = integrate_by_parts(&d, |r| r, |_| 1.0, 1.0, &cfg).unwrap();
        assert!((ev.direct.re - 0.5).abs() < 1e-15);
        // partial range: only the distribution form
        let ev = integrate_by_parts(&d, |r| r, |_| 1.0, 0.5, &cfg).unwrap();
        assert_eq!(ev.direct.re, 0.0);
        assert!(ev.averages.is_none());
        assert!(integrate_by_parts(&d, |r| r, |_| 1.0, 0.0, &cfg).is_err());
    }

    #[test]
    fn integration_by_parts_catches_wrong_derivative() {
        let cfg = QuadratureConfig::default();
        let err = integrate_by_parts(&eta0(), |r| r * r, |r| r, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::Verification { .. }));
    }

    #[test]
    fn kernel_examples() {
        assert!((lip_kernel_integral(1) - 16.0 / 27.0).abs() < 1e-15);
        assert!((lip_kernel_integral(2) - 0.375).abs() < 1e-15);
        for n in [1, 2, 10, 50] {
            assert!((lip_kernel_integral(n) - lip_kernel_integral_numeric(n)).abs() < 1e-9);
        }
        for n in [1u64, 5, 1000] {
            let k = LipschitzKernel::new(n);
            assert_eq!(k.antiderivative(0.0), 0.0);
            assert!((k.antiderivative(1.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn average_function_sup() {
        let d = RadialMeasure::dirac(0.5).unwrap();
        let k = AverageFunction::new(&d);
        assert!((k.sup_estimate() - 8.0 / 3.0).abs() < 1e-14);
        assert!((k.eval(0.0).unwrap().re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn range_is_ordered_and_tagged() {
        let cfg = QuadratureConfig::default();
        let seq = gamma_range(
            &eta0(),
            2..=5,
            SpectralMethod::Moments,
            &cfg,
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(seq.values.len(), 4);
        assert_eq!(seq.get(2), Some(gamma(&eta0(), 2)));
        assert_eq!(seq.get(6), None);
        assert_eq!(seq.measure, "lebesgue");
        assert_eq!(
            "averages".parse::<SpectralMethod>().unwrap(),
            SpectralMethod::Averages
        );
    }
}
