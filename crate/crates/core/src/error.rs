use thiserror::Error;

/// Errors raised by the bound evaluators, samplers and oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("empty vector")]
    EmptyVector,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("hypothesis violated: {0}")]
    Domain(String),

    #[error("value out of representable range: {0}")]
    Range(String),

    #[error("bound not applicable: {0}")]
    NotApplicable(String),

    #[error("no valid spread parameter: {0}")]
    NoValidSpread(String),

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("no convergence: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
