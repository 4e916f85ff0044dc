use std::fmt;
use std::io;

/// Errors surfaced by dataset planning, simulation sizing, and file output.
///
/// Contract violations (bad qubit indices, duplicate controls, unnormalized
/// states) panic instead; they indicate caller bugs, not recoverable
/// conditions.
#[derive(Debug)]
pub enum Error {
    /// Malformed or out-of-range user input.
    InvalidInput(String),
    /// Requested simulation exceeds the host resource cap.
    ResourceLimit(String),
    /// Underlying I/O failure.
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::ResourceLimit(msg) => write!(f, "resource limit: {msg}"),
            Error::Io(err) => write!(f, "i/o error: {err}"),
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

pub type Result<T> = std::result::Result<T, Error>;
