use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension {dim} exceeds the dense limit {limit}")]
    SizeLimit { dim: usize, limit: usize },

    #[error("did not converge: {0}")]
    NotConverged(String),

    #[error(
        "Chebyshev recursion norm grew by {growth:.3e} at step {step}; \
         the scale is below the spectral radius, retry with scale >= {hint:.4}"
    )]
    ScaleViolation { step: usize, growth: f64, hint: f64 },

    #[error("bond dimension {bond} at site {site} exceeds the budget {budget}")]
    Resource { site: usize, bond: usize, budget: usize },

    #[error("coupling range {range} exceeds the supported range {max}")]
    RangeTooLong { range: usize, max: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no relaxation peak found: {0}")]
    NoPeak(String),

    #[error("time step {h} is unstable (norm grew to {norm:.3e}); try h <= {suggested}")]
    Unstable { h: f64, norm: f64, suggested: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
