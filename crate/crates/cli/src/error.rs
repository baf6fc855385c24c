use std::fmt::Display;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or invalid scenario content.
    #[error("{file}: {location}: {message}")]
    Input {
        file: String,
        location: String,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn input(file: &str, location: impl Into<String>, message: impl Display) -> Self {
        CliError::Input {
            file: file.to_string(),
            location: location.into(),
            message: message.to_string(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Every setup failure is an input error.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
