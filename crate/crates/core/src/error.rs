use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the spectrum model, allocators and experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {what} is {found}, expected {expected}")]
    Dimension {
        what: &'static str,
        expected: String,
        found: String,
    },

    #[error("assignment is not conflict free: {0}")]
    Infeasible(String),

    #[error("no candidate with positive selection mass")]
    NoCandidate,

    #[error("empty reward vector")]
    EmptyRewards,

    #[error("instance too large for exhaustive search: {space} candidate assignments exceed the cap of {cap}{context}")]
    Capacity {
        space: f64,
        cap: u64,
        context: String,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed scenario {}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("CSV error on {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dimension(what: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::Dimension {
            what,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
