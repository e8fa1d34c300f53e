//! Composite Gauss–Legendre quadrature on piecewise-smooth integrands.
//!
//! Panels are delimited by caller-supplied breakpoints (atoms, density
//! endpoints) plus a geometric ladder `1 - 2^-j` toward `r = 1`. The error
//! estimate is the difference between the rule on each panel split `split`
//! times and `2 * split` times.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// Depth of the geometric ladder `1 - 2^-j`, `j = 1..=geometric_levels`.
    pub geometric_levels: u32,
    /// Uniform sub-panels per panel in the coarse rule.
    pub split: usize,
    /// Mixed tolerance on the error estimate: `err <= tol * (1 + |value|)`.
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            nodes: 32,
            geometric_levels: 40,
            split: 2,
            tolerance: 1e-9,
        }
    }
}

impl QuadratureConfig {
    /// Width of the last geometric panel `[1 - eps, 1)`.
    pub fn boundary_width(&self) -> f64 {
        2f64.powi(-(self.geometric_levels as i32))
    }

    pub fn accept(&self, est: Estimate) -> Result<Complex64> {
        let target = self.tolerance * (1.0 + est.value.norm());
        if est.error.is_finite() && est.error <= target {
            Ok(est.value)
        } else {
            Err(Error::NonConvergence {
                value: est.value.norm(),
                achieved: est.error,
                target,
            })
        }
    }
}

/// A value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: Complex64) -> Self {
        Estimate { value, error: 0.0 }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: &F, a: f64, b: f64) -> Complex64 {
        self.mapped(a, b).map(|(x, w)| f(x) * w).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Sorted panel boundaries on `[lo, hi]`: the endpoints, every `extra` point
/// strictly inside, and the geometric ladder toward 1.
pub fn panel_breaks(lo: f64, hi: f64, extra: &[f64], cfg: &QuadratureConfig) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    pts.extend(extra.iter().copied().filter(|&x| x > lo && x < hi));
    pts.extend(
        (1..=cfg.geometric_levels)
            .map(|j| 1.0 - 2f64.powi(-(j as i32)))
            .filter(|&x| x > lo && x < hi),
    );
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Quadrature nodes `(x, w)` for `dr` on the given panels, each panel cut into `split` pieces.
pub fn panel_nodes(breaks: &[f64], split: usize, rule: &GaussLegendre) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(breaks.len() * split * rule.nodes.len());
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let h = (b - a) / split as f64;
        for s in 0..split {
            let lo = a + h * s as f64;
            let hi = if s + 1 == split { b } else { lo + h };
            out.extend(rule.mapped(lo, hi));
        }
    }
    out
}

/// Integrates `f(r) dr` over the panels delimited by `breaks`.
pub fn integrate_panels<F>(f: F, breaks: &[f64], cfg: &QuadratureConfig) -> Estimate
where
    F: Fn(f64) -> Complex64,
{
    let rule = GaussLegendre::new(cfg.nodes);
    let coarse: Complex64 = panel_nodes(breaks, cfg.split, &rule)
        .into_iter()
        .map(|(x, w)| f(x) * w)
        .sum();
    let fine: Complex64 = panel_nodes(breaks, 2 * cfg.split, &rule)
        .into_iter()
        .map(|(x, w)| f(x) * w)
        .sum();
    Estimate {
        value: fine,
        error: (fine - coarse).norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_exact_for_polynomials() {
        let gl = GaussLegendre::new(32);
        let total: f64 = gl.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // exact through degree 63
        for d in [0, 5, 62, 63] {
            let v = gl
                .integrate(&|x| Complex64::new(x.powi(d), 0.0), 0.0, 1.0)
                .re;
            assert!((v - 1.0 / (d as f64 + 1.0)).abs() < 1e-15, "degree {d}");
        }
    }

    #[test]
    fn small_rules_match_tables() {
        let gl = GaussLegendre::new(2);
        assert!((gl.nodes[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let gl = GaussLegendre::new(3);
        assert_eq!(gl.nodes[1], 0.0);
        assert!((gl.weights[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((gl.nodes[2] - 0.6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn breaks_include_ladder_and_extras() {
        let cfg = QuadratureConfig::default();
        let b = panel_breaks(0.0, 1.0, &[0.3, 0.5, 1.2], &cfg);
        assert_eq!(b[0], 0.0);
        assert_eq!(*b.last().unwrap(), 1.0);
        assert!(b.contains(&0.3));
        assert_eq!(b.iter().filter(|&&x| x == 0.5).count(), 1);
        assert_eq!(b.len(), 2 + 1 + 40);
    }

    #[test]
    fn endpoint_singularity_is_tamed_by_ladder() {
        // ∫₀¹ (1-r)^{-1/2} dr = 2, up to the unresolved last panel (~2^-19)
        let cfg = QuadratureConfig::default();
        let breaks = panel_breaks(0.0, 1.0, &[], &cfg);
        let est = integrate_panels(|r| Complex64::new((1.0 - r).powf(-0.5), 0.0), &breaks, &cfg);
        assert!((est.value.re - 2.0).abs() < 1e-5);
        let est = integrate_panels(
            |r| Complex64::new(r.powi(127) * (1.0 - r * r), 0.0),
            &breaks,
            &cfg,
        );
        assert!((est.value.re - (1.0 / 128.0 - 1.0 / 130.0)).abs() < 1e-15);
        assert!(est.error < 1e-15);
    }

    #[test]
    fn accept_rejects_large_error() {
        let cfg = QuadratureConfig::default();
        let bad = Estimate {
            value: Complex64::new(1.0, 0.0),
            error: 1e-3,
        };
        assert!(matches!(cfg.accept(bad), Err(Error::NonConvergence { .. })));
        assert!(cfg
            .accept(Estimate::exact(Complex64::new(2.0, 0.0)))
            .is_ok());
    }
}
