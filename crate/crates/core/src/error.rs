use thiserror::Error;

/// Errors raised by model construction, solving, decoding and the oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("simplex iteration limit of {limit} exceeded")]
    IterationLimit { limit: usize },

    #[error("solution has no incumbent to decode")]
    NoIncumbent,

    #[error("decode failed: {0}")]
    Decode(String),

    #[error("oracle size bound exceeded: {0}")]
    OracleLimit(String),

    #[error("plan check failed: {0}")]
    Verify(String),

    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
