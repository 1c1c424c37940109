use thiserror::Error;

/// Errors raised by the library.
///
/// The variants map onto the CLI exit codes: precondition violations exit
/// with 2, certification failures with 3 and pipeline incompleteness with 4.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arity mismatch: form has {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("pipeline incomplete: {0}")]
    Uncovered(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn certification(msg: impl Into<String>) -> Self {
        Error::Certification(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Arity { .. } | Error::Precondition(_) | Error::Parse(_) => 2,
            Error::Certification(_) => 3,
            Error::Uncovered(_) => 4,
            Error::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
