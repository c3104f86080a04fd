use std::path::PathBuf;

use mpsbeam_core::{ChannelFileError, Error};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid scenario file.
    #[error("config error: {0}")]
    Config(String),

    /// A referenced input file is missing or malformed.
    #[error("input error: {0}")]
    Input(#[from] ChannelFileError),

    /// A value left the numeric domain while running.
    #[error("numeric domain error: {0}")]
    Domain(String),

    #[error("cannot write {}: {message}", .path.display())]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Input(_) => 3,
            CliError::Domain(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(msg) => CliError::Domain(msg),
            Error::Config(msg) => CliError::Config(msg),
            Error::ChannelFile(f) => CliError::Input(f),
        }
    }
}
