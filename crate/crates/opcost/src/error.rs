//! CLI-level errors, partitioned by exit code.

use thiserror::Error;

/// Process-level failure classes. The exit code contract: 1 for usage
/// errors, 2 for parse and validation errors, 3 for I/O errors.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Io(String),
}

impl AppError {
    pub fn usage(message: impl Into<String>) -> AppError {
        AppError::Usage(message.into())
    }

    pub fn data(message: impl Into<String>) -> AppError {
        AppError::Data(message.into())
    }

    pub fn io(message: impl Into<String>) -> AppError {
        AppError::Io(message.into())
    }

    #[must_use]
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Data(_) => 2,
            AppError::Io(_) => 3,
        }
    }
}

impl From<opcost_core::Error> for AppError {
    fn from(err: opcost_core::Error) -> AppError {
        AppError::Data(err.to_string())
    }
}
