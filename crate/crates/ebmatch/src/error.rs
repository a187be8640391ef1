use std::io;

/// Errors of the experiment layer and the command line.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] ebmatch_core::Error),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("invalid value for `{key}`: {reason}")]
    Usage { key: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                other => Error::Format(format!("{other:?}")),
            }
        } else {
            Error::Format(e.to_string())
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.into())
        } else {
            Error::Format(e.to_string())
        }
    }
}

pub fn usage(key: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Usage { key: key.into(), reason: reason.into() }
}

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// A check (oracle agreement or an experiment assertion) failed.
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const SIZE_CAP: i32 = 3;
    pub const IO: i32 = 4;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(ebmatch_core::Error::SizeCap { .. }) => exit::SIZE_CAP,
            Error::Core(_) | Error::Usage { .. } => exit::USAGE,
            Error::Io(_) => exit::IO,
            Error::Format(_) => exit::USAGE,
        }
    }
}
