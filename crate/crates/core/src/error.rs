use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("column {0} has zero variance; drop it before standardizing")]
    DegenerateColumn(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("rank {rank} is outside 1..={max}")]
    Rank { rank: usize, max: usize },

    #[error("invalid constraint: {0}")]
    Constraint(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("projection input is zero on every admissible support")]
    ZeroInput,

    #[error("all {rounds} rounds were discarded: the rank-r surrogate is zero")]
    DegenerateInput { rounds: u64 },

    #[error("capacity exceeded: {what} requires {required}")]
    Capacity { what: String, required: String },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
