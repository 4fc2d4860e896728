use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value encountered: {0}")]
    Numeric(String),

    #[error("empty domain")]
    EmptyDomain,

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("degenerate hypersurface: {0}")]
    Degenerate(String),

    #[error("admissibility violated at node {index}: |grad ln f| = {value}")]
    Inadmissible { index: usize, value: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
