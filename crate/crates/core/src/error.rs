use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range 1..={p}")]
    NodeOutOfRange { index: usize, p: usize },

    #[error("self-loop at node {0} is not allowed")]
    SelfLoop(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (relative asymmetry {0:.3e})")]
    NotSymmetric(f64),

    /// Cholesky pivot at 1-based index `pivot` was not strictly positive.
    #[error("matrix is not positive definite (pivot {pivot} = {value:.6e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("node set {0:?} is not a clique of the graph")]
    NotAClique(Vec<usize>),

    #[error("completion did not converge after {sweeps} sweeps (last change {residual:.3e})")]
    NotConverged { sweeps: usize, residual: f64 },

    #[error("graph is not decomposable; closed-form normalizing constant unavailable")]
    NotDecomposable,

    #[error("exact enumeration supports p <= 3 (p = {0}); larger graph spaces contain non-decomposable graphs")]
    EnumerationTooLarge(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Whether this error came from numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. } | Error::NotConverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
