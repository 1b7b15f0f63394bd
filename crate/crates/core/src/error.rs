use thiserror::Error;

/// Failure classes shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed inputs: dimension mismatches, bad atom indices, broken active sets.
    #[error("structural error: {0}")]
    Structural(String),
    /// Non-finite values or numerical breakdown.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Invalid solver or experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// The operation is not available for this polytope representation or size.
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("problem file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn structural<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Structural(msg.into()))
}

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
