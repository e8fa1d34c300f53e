//! Real polynomials on an interval: evaluation, real-root isolation and sign analysis.

use nalgebra::{DMatrix, Schur};

use crate::error::{Error, Result};

/// Outcome of a nonnegativity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Positivity {
    Certified,
    NotPositive,
    Unknown,
}

/// Horner evaluation of `Σ c_m x^m`.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, c)| m as f64 * c)
        .collect()
}

fn trimmed(coeffs: &[f64]) -> &[f64] {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].abs() <= 1e-15 * scale {
        end -= 1;
    }
    &coeffs[..end]
}

/// Real roots strictly inside `(lo, hi)`, sorted, via companion-matrix eigenvalues
/// followed by Newton polishing.
pub fn real_roots_in(coeffs: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    let c = trimmed(coeffs);
    if c.len() <= 1 {
        return Ok(Vec::new());
    }
    let d = c.len() - 1;
    let lead = c[d];
    let mut companion = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        companion[(i, d - 1)] = -c[i] / lead;
    }
    let schur =
        Schur::try_new(companion, f64::EPSILON, 10_000).ok_or_else(|| Error::RootFinding {
            lo,
            hi,
            reason: "companion eigenvalue iteration did not converge".into(),
        })?;
    let dc = derivative(c);
    let width = hi - lo;
    let mut roots = Vec::new();
    for z in schur.complex_eigenvalues().iter() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::RootFinding {
                lo,
                hi,
                reason: "non-finite eigenvalue".into(),
            });
        }
        // clustered (near-double) roots come back with a small imaginary part
        if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
            continue;
        }
        let mut x = z.re;
        for _ in 0..8 {
            let dp = eval(&dc, x);
            if dp == 0.0 {
                break;
            }
            let step = eval(c, x) / dp;
            if !step.is_finite() || step.abs() > 1e-3 * (1.0 + width) {
                break;
            }
            x -= step;
        }
        if x > lo && x < hi {
            roots.push(x);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    Ok(roots)
}

/// Sign of the polynomial on an open interval known to contain no sign change,
/// checked on Chebyshev nodes. `None` if the samples disagree.
fn piece_sign(coeffs: &[f64], lo: f64, hi: f64) -> Option<i8> {
    const SAMPLES: usize = 16;
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let noise = 64.0 * f64::EPSILON * scale * coeffs.len() as f64;
    let mut sign = 0i8;
    for i in 0..SAMPLES {
        let t = (std::f64::consts::PI * (i as f64 + 0.5) / SAMPLES as f64).cos();
        let v = eval(coeffs, mid + half * t);
        let s = if v > noise {
            1
        } else if v < -noise {
            -1
        } else {
            0
        };
        if s != 0 {
            if sign != 0 && s != sign {
                return None;
            }
            sign = s;
        }
    }
    Some(sign)
}

/// Splits `[lo, hi)` at interior real roots and returns each piece with its sign
/// (`1`, `-1`, or `0` for a numerically vanishing piece).
pub fn sign_pieces(coeffs: &[f64], lo: f64, hi: f64) -> Result<Vec<(f64, f64, i8)>> {
    let roots = real_roots_in(coeffs, lo, hi)?;
    let mut cuts = Vec::with_capacity(roots.len() + 2);
    cuts.push(lo);
    cuts.extend(roots);
    cuts.push(hi);
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            piece_sign(coeffs, w[0], w[1])
                .map(|s| (w[0], w[1], s))
                .ok_or_else(|| Error::RootFinding {
                    lo: w[0],
                    hi: w[1],
                    reason: "sign not constant between isolated roots".into(),
                })
        })
        .collect()
}

/// Whether `Σ c_m r^m ≥ 0` almost everywhere on `[lo, hi)`. Never reports
/// `Certified` when the analysis is inconclusive.
pub fn certify_nonnegative(coeffs: &[f64], lo: f64, hi: f64) -> Positivity {
    match sign_pieces(coeffs, lo, hi) {
        Ok(pieces) if pieces.iter().all(|p| p.2 >= 0) => Positivity::Certified,
        Ok(_) => Positivity::NotPositive,
        Err(_) => Positivity::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner() {
        assert_eq!(eval(&[1.0, 2.0, 3.0], 2.0), 17.0);
        assert_eq!(eval(&[], 2.0), 0.0);
    }

    #[test]
    fn linear_root() {
        let r = real_roots_in(&[-1.0, 2.0], 0.0, 1.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cubic_roots_inside_interval() {
        // (r - 0.2)(r - 0.5)(r - 0.9)
        let c = [-0.09, 0.73, -1.6, 1.0];
        let r = real_roots_in(&c, 0.0, 1.0).unwrap();
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([0.2, 0.5, 0.9]) {
            assert!((got - want).abs() < 1e-12);
        }
        let r = real_roots_in(&c, 0.3, 1.0).unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn sign_split_of_2r_minus_1() {
        let pieces = sign_pieces(&[-1.0, 2.0], 0.0, 1.0).unwrap();
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].2, -1);
        assert_eq!(pieces[1].2, 1);
        assert!((pieces[0].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn certification() {
        assert_eq!(
            certify_nonnegative(&[0.0, 1.0], 0.0, 1.0),
            Positivity::Certified
        );
        assert_eq!(
            certify_nonnegative(&[-1.0, 2.0], 0.0, 1.0),
            Positivity::NotPositive
        );
        assert_eq!(
            certify_nonnegative(&[-1.0, 2.0], 0.5, 1.0),
            Positivity::Certified
        );
        // touching zero: (r - 1/2)^2
        assert_eq!(
            certify_nonnegative(&[0.25, -1.0, 1.0], 0.0, 1.0),
            Positivity::Certified
        );
        assert_eq!(certify_nonnegative(&[0.0], 0.0, 1.0), Positivity::Certified);
        // no real roots at all: 1 + r^2
        assert_eq!(
            certify_nonnegative(&[1.0, 0.0, 1.0], 0.0, 1.0),
            Positivity::Certified
        );
    }
}
