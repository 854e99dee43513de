use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The caller violated a precondition (length mismatch, bad index, bad flag combination).
    #[error("usage error: {0}")]
    Usage(String),
    /// The requested exact computation is not available for this operator or size.
    #[error("capability error: {0}")]
    Capability(String),
    /// An operator spec string or numeric literal could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}

pub(crate) fn capability<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capability(msg.into()))
}
