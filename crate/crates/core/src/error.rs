use std::path::PathBuf;

/// Errors raised anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent or malformed inputs (dimension mismatch, empty grids, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// A configuration file could not be interpreted.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed binary field or rule file.
    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    /// An iterative numerical routine failed to converge.
    #[error("no convergence: {0}")]
    Convergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
