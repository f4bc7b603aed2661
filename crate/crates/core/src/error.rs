use num_complex::Complex64;
use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid interval [{a}, {b}]: need 1 <= a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("exponential sum vanishes (numerically) at p = {p}")]
    AtSingularity { p: Complex64 },

    #[error(
        "contour passes within {min_ratio:e} (relative) of a zero; \
         inflate the rectangle by a factor {suggested_inflation} and retry"
    )]
    BoundaryTooClose {
        min_ratio: f64,
        suggested_inflation: f64,
    },

    #[error("contour quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("continuation failed near p = {at}: {reason}")]
    ContinuationFailed { at: Complex64, reason: String },

    #[error("degenerate matrix shape {rows}x{cols}")]
    DegenerateShape { rows: usize, cols: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
