use alloc::string::String;

/// Errors raised by core routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate in point {index}")]
    NonFinite { index: usize },
    #[error("{what}: size {size} exceeds cap {cap}")]
    SizeCap { what: &'static str, size: usize, cap: usize },
    #[error("index {index} out of range for side of size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("invalid solution: {0}")]
    InvalidSolution(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
