use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient conditioning events: pooled {count} record events")]
    InsufficientEvents { count: u64 },

    #[error("candidate budget exceeded: expected slab count {lambda:.6e} > budget {budget:.6e}")]
    CandidateBudgetExceeded { lambda: f64, budget: f64 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
