//! Exit-code discipline: 0 success, 1 I/O error, 2 specification error.

use invinf::corpus::IngestError;
use invinf::stats::{FitError, TableError};
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or unwritable files, malformed streams.
    Io(String),
    /// Bad flags, bad model specs, rank deficiency, impossible requests.
    Spec(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Spec(_) => 2,
        }
    }

    pub fn spec(msg: impl Into<String>) -> CliError {
        CliError::Spec(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> CliError {
        CliError::Io(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Spec(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        CliError::Spec(e.to_string())
    }
}

impl From<TableError> for CliError {
    fn from(e: TableError) -> Self {
        match e {
            TableError::Csv(inner) => CliError::Io(inner.to_string()),
            other => CliError::Spec(other.to_string()),
        }
    }
}
