use thiserror::Error;

/// Errors raised by the geometric routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    /// Input violates a precondition.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A numerical procedure failed to meet its own diagnostic.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(GeoError::Invalid(msg.into()))
}

pub(crate) fn numerical<T>(msg: impl Into<String>) -> Result<T> {
    Err(GeoError::Numerical(msg.into()))
}
