use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] io::Error),

    /// Malformed treebank, head-rule, or action-sequence input.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty corpus: {0}")]
    EmptyCorpus(&'static str),

    #[error("illegal action {action}: {reason}")]
    IllegalAction { action: String, reason: String },

    #[error("not derivable: {0}")]
    NotDerivable(String),

    #[error("replay failed: {0}")]
    Replay(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("model file: {field}: {message}")]
    ModelFormat { field: String, message: String },

    #[error("evaluation: {0}")]
    Eval(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn model(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ModelFormat {
            field: field.into(),
            message: message.into(),
        }
    }
}
