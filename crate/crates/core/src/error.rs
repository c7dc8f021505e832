//! Error type shared across the crate.

use std::fmt;
use std::io;

/// Errors produced by signal construction, transforms, estimators, and file parsing.
#[derive(Debug)]
pub enum Error {
    /// A precondition on arguments or data was violated.
    InvalidInput(String),
    /// A text input (signal file, intervals file, config file) could not be parsed.
    /// `line` is 1-based; 0 means the error is not tied to a specific line.
    Parse { line: usize, message: String },
    /// An iterative estimator failed to reach its convergence tolerance.
    NonConvergence(String),
    /// Underlying I/O failure.
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Parse { line: 0, message } => write!(f, "parse error: {message}"),
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::NonConvergence(msg) => write!(f, "did not converge: {msg}"),
            Error::Io(err) => write!(f, "io error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(err: io::Error) -> Self {
        Error::Io(err)
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Io(io::Error::new(io::ErrorKind::InvalidData, err))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for `Error::InvalidInput` with a formatted message.
macro_rules! invalid_input {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(format!($($arg)*))
    };
}
pub(crate) use invalid_input;
