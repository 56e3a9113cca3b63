//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field failed validation.
    #[error("invalid config: {field}: {message}")]
    Config { field: String, message: String },

    /// Inputs to an evaluation did not line up.
    #[error("evaluation error: {0}")]
    Eval(String),

    /// A runtime failure inside the pipeline, with frame context.
    #[error("frame {frame}: {message}")]
    Frame { frame: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config { field: field.to_string(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
