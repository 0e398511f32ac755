use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
    #[error("numerical invariant violated: {0}")]
    Invariant(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Format { .. } => 2,
            CliError::Invariant(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

/// Attributes a core error to the config key that produced its input.
pub(crate) fn keyed(key: &str) -> impl FnOnce(mtq_core::Error) -> CliError + '_ {
    move |e| CliError::config(key, e.to_string())
}

pub type CliResult<T> = Result<T, CliError>;
