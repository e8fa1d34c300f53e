//! Shared tolerances and the mixed absolute/relative comparison.

use num_complex::Complex64;

/// Closed-form paths.
pub const EXACT_TOL: f64 = 1e-12;
/// Quadrature and series paths.
pub const QUADRATURE_TOL: f64 = 1e-8;

/// `|x - y| <= tol * (1 + max(|x|, |y|))`.
pub fn close(x: Complex64, y: Complex64, tol: f64) -> bool {
    mixed_gap(x, y) <= tol
}

/// `|x - y| / (1 + max(|x|, |y|))`.
pub fn mixed_gap(x: Complex64, y: Complex64) -> f64 {
    (x - y).norm() / (1.0 + x.norm().max(y.norm()))
}

pub fn close_re(x: f64, y: f64, tol: f64) -> bool {
    close(Complex64::new(x, 0.0), Complex64::new(y, 0.0), tol)
}
