use std::fmt;

/// Errors produced by the core library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Round-key combination selection could not find enough distinct values.
    #[error("derivation failure: {0}")]
    DerivationFailure(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A contract between modules was violated. Indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl fmt::Display) -> Self {
        Error::InvalidArgument(msg.to_string())
    }

    pub(crate) fn parse(line: usize, msg: impl fmt::Display) -> Self {
        Error::Parse {
            line,
            message: msg.to_string(),
        }
    }
}
