use thiserror::Error;

/// Errors raised by the regularization library.
#[derive(Debug, Error)]
pub enum TikhError {
    #[error("matrix is not symmetric positive definite (non-positive pivot {pivot:e} at row {row})")]
    NotSpd { row: usize, pivot: f64 },

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("eigensolver did not converge within {budget} iterations")]
    ConvergenceFailure { budget: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("argument outside its domain: {0}")]
    Domain(String),

    #[error("problem size {n} exceeds the cap of {cap} unknowns")]
    SizeCap { n: usize, cap: usize },

    #[error("regularization parameter must be positive and finite, got {0:e}")]
    NonFiniteLambda(f64),

    #[error("scaled solution norm is zero; the parameter rule is undefined")]
    ZeroSolutionNorm,

    #[error("regularized solution vanished at lambda = {lambda:e}; the parameter is far too large")]
    DegenerateSolution { lambda: f64 },

    #[error("spectrum too short for the decay fit: {retained} retained eigenvalues, need at least {needed}")]
    InsufficientSpectrum { retained: usize, needed: usize },

    #[error("sample has zero spread; standardization is undefined")]
    DegenerateSample,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed problem file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = TikhError> = std::result::Result<T, E>;
