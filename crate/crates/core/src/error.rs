use thiserror::Error;

/// Errors raised by the cone, metric and construction operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("rejected input: {0}")]
    Rejected(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("point outside the metric's domain: {0}")]
    OutsideDomain(String),

    #[error("size bound exceeded: {what} is {actual}, limit {limit}")]
    TooLarge {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
