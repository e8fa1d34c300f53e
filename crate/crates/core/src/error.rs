use thiserror::Error;

use crate::dsl::Diagnostic;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument or measure parameter lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("measure description rejected: {}", .0.first().map(|d| d.message.as_str()).unwrap_or("unknown"))]
    Parse(Vec<Diagnostic>),

    /// Quadrature or series evaluation could not reach the requested tolerance.
    #[error(
        "no convergence: value {value:e}, achieved error estimate {achieved:e} (target {target:e})"
    )]
    NonConvergence {
        value: f64,
        achieved: f64,
        target: f64,
    },

    #[error("series horizon {horizon} exceeded; best tail bound {best_bound:e}")]
    HorizonExceeded { horizon: usize, best_bound: f64 },

    #[error("root isolation failed on [{lo}, {hi}): {reason}")]
    RootFinding { lo: f64, hi: f64, reason: String },

    /// Two routes to the same quantity disagree beyond tolerance.
    #[error("verification failed: {what}; values {values:?}")]
    Verification { what: String, values: Vec<f64> },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line driver for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Verification { .. } => 1,
            Error::Domain(_) | Error::Parse(_) => 2,
            Error::NonConvergence { .. }
            | Error::HorizonExceeded { .. }
            | Error::RootFinding { .. } => 3,
        }
    }
}
