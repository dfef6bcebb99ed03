use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown operator tag `{0}`")]
    UnknownOperator(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("truncation dimension {dim} too small for support {support} and order {order}")]
    Truncation { dim: usize, support: usize, order: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("projection onto lattice (offset {offset}, spacing {spacing}) is empty")]
    EmptyProjection { offset: usize, spacing: usize },

    #[error("density matrix invalid: {0}")]
    InvalidDensityMatrix(String),

    #[error("matrix is not symmetric (deviation {0:e})")]
    NotSymmetric(f64),

    #[error("expectation value not real (imaginary part {0:e})")]
    NonReal(f64),

    #[error("zero polynomial is not a witness")]
    ZeroPolynomial,

    #[error("state is not rotationally invariant (off-diagonal {0:e})")]
    NotRotationallyInvariant(f64),

    #[error("degenerate closed form: denominator {0:e}")]
    Degenerate(f64),

    #[error("integer overflow in exact determinant at level {0}")]
    Overflow(usize),

    #[error("{what} did not converge (error estimate {estimate:e})")]
    NonConvergence { what: &'static str, estimate: f64 },

    #[error("noise variance {0} below the vacuum smoothing threshold 0.5")]
    NoiseBelowThreshold(f64),

    #[error("smoothed density negative ({0:e}) on the grid")]
    NegativeDensity(f64),

    #[error("sampling grid too small: density {0:e} at the boundary")]
    GridUnderflow(f64),

    #[error("non-finite result: {0}")]
    NonFinite(String),

    #[error("state spec: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
