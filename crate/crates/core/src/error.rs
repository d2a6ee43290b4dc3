use thiserror::Error;

/// Errors raised while building spaces, parsing inputs or evaluating operators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {reason}")]
    InvalidSpace {
        reason: String,
        witness: Option<Vec<String>>,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{0}")]
    NoAdmissibleScale(String),

    #[error("Dini condition fails: {0}")]
    DiniDivergence(String),

    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected, got })
        }
    }
}
