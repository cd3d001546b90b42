use std::path::PathBuf;

use semigroup_lab::LabError;
use thiserror::Error;

use crate::{EXIT_CONFIG, EXIT_NUMERICAL};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: `{key}`: {detail}")]
    Config { key: String, detail: String },

    #[error(transparent)]
    Lab(#[from] LabError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {detail}")]
    Data { path: PathBuf, detail: String },
}

impl CliError {
    pub fn config(key: impl Into<String>, detail: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            detail: detail.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 3 for numerical failures, 2 for everything the caller got wrong.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lab(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}
