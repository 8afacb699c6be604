use alloc::string::String;
use core::fmt;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidArgument(String),
    /// Input text could not be interpreted. `line` is 1-based.
    Parse { line: usize, message: String },
    /// Table contents violated a structural rule.
    InvalidTable(String),
    /// Rank correlation is undefined because one input has no rank variance.
    UndefinedCorrelation,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::InvalidTable(msg) => write!(f, "invalid cost table: {msg}"),
            Error::UndefinedCorrelation => {
                write!(f, "correlation undefined: an input has zero rank variance")
            }
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn table(msg: impl Into<String>) -> Self {
        Error::InvalidTable(msg.into())
    }
}
