use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by constructions and checkers.
///
/// The variants line up with the CLI exit codes: input problems exit with 2,
/// exhausted budgets with 4 and consistency failures with 5.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("resource error: {what} exceeds the configured cap of {cap}")]
    Resource { what: String, cap: u64 },

    #[error("resource error: {what} needs {need}, found {have}")]
    Insufficient { what: String, need: u64, have: u64 },

    #[error("stale witness: structure digest {found} does not match witness digest {expected}")]
    StaleWitness { expected: String, found: String },

    /// An invariant that a theorem guarantees was observed to fail. Always a bug.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn resource(what: impl Into<String>, cap: u64) -> Self {
        Error::Resource {
            what: what.into(),
            cap,
        }
    }

    pub fn insufficient(what: impl Into<String>, need: u64, have: u64) -> Self {
        Error::Insufficient {
            what: what.into(),
            need,
            have,
        }
    }

    pub fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Io { .. } | Error::Json(_) | Error::StaleWitness { .. } => 2,
            Error::Resource { .. } | Error::Insufficient { .. } => 4,
            Error::Consistency(_) => 5,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
