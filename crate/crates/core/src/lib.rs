//! Radial Toeplitz operators on the Bergman space of the unit disk.
//!
//! A radial measure is described by its radial part `η` on `[0, 1)`
//! ([`RadialMeasure`]). The operator `T_η` is diagonal in the monomial basis
//! with eigenvalues `γ(n) = 2(n+1) ∫ r^{2n} dη`; this crate computes those,
//! the averages `κ`, the Berezin transform, boundedness diagnostics and a
//! matrix oracle that checks diagonality directly.
//!
//! ```
//! use radial_toeplitz::{dsl, spectral};
//!
//! let eta = dsl::parse_measure("dirac(0.5)").unwrap();
//! assert!((spectral::gamma(&eta, 2).re - 6.0 * 0.5f64.powi(4)).abs() < 1e-15);
//! ```

pub mod acceptance;
pub mod berezin;
pub mod carleson;
pub mod dsl;
pub mod error;
pub mod exec;
pub mod measure;
pub mod oracle;
pub mod output;
pub mod poly;
pub mod quadrature;
pub mod special;
pub mod spectral;
pub mod tolerance;

pub use error::{Error, Result};
pub use exec::Execution;
pub use measure::{MeasurePrimitive, RadialMeasure};
pub use quadrature::QuadratureConfig;
