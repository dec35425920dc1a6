use thiserror::Error;

/// Crate-wide error type.
///
/// `Domain` marks arguments outside an operation's mathematical domain,
/// `Config` marks inconsistent user-supplied parameters, `Numerical` marks
/// iteration or quadrature failures, and `Resolution` marks sampling that is
/// too coarse for the requested tolerance (the message states what is needed).
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("premise failure: {0}")]
    Premise(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
    pub fn resolution(msg: impl Into<String>) -> Self {
        Error::Resolution(msg.into())
    }
    pub fn premise(msg: impl Into<String>) -> Self {
        Error::Premise(msg.into())
    }
}
