use thiserror::Error;

/// Library error. The CLI maps `Usage` and `Parse` to exit code 2 and
/// `InvariantViolation` to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("environment error: {0}")]
    Environment(String),
}

impl ArrError {
    pub fn usage(msg: impl Into<String>) -> Self {
        ArrError::Usage(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        ArrError::InvariantViolation(msg.into())
    }

    pub fn parse(line: usize, column: usize, msg: impl Into<String>) -> Self {
        ArrError::Parse {
            line,
            column,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, ArrError>;
