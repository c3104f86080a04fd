use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numerical input lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is invalid or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    ChannelFile(#[from] ChannelFileError),
}

/// Failures while reading or writing a channel CSV file.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelFileError {
    #[error("channel file not found: {}", .0.display())]
    Missing(PathBuf),

    #[error("i/o error on {}: {message}", .path.display())]
    Io { path: PathBuf, message: String },

    #[error("line {line}: expected header `{expected}`")]
    BadHeader { line: usize, expected: &'static str },

    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: field `{field}` is not a finite number: {value:?}")]
    BadNumber {
        line: usize,
        field: &'static str,
        value: String,
    },

    #[error("line {line}: subcarrier index {found} out of sequence, expected {expected}")]
    IndexMismatch {
        line: usize,
        expected: usize,
        found: String,
    },

    #[error("channel file contains no data rows")]
    Empty,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
