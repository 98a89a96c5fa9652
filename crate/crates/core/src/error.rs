use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is out of range (expected {expected})")]
    Range {
        what: &'static str,
        value: String,
        expected: String,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("point id {0} is not in the index")]
    NotFound(u64),

    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn range(what: &'static str, value: impl ToString, expected: impl ToString) -> Self {
        Error::Range {
            what,
            value: value.to_string(),
            expected: expected.to_string(),
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// True for failures caused by input data (unreadable, malformed or
    /// missing files), as opposed to violated preconditions.
    pub fn is_data_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Data(_) | Error::Io(_))
    }
}
