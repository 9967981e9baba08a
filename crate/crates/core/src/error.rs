use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{what} needs {requested} but the budget is {limit}")]
    Budget {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("rank {rank} outside 1..={length}")]
    RankOutOfRange { rank: u64, length: u64 },

    #[error("{value} is beyond the sieve limit {limit}")]
    OutOfSieve { value: i64, limit: u64 },

    #[error("sieve limit {limit} is too small, labels reach {needed}")]
    SieveTooSmall { needed: i64, limit: u64 },

    #[error("shift {shift} exceeds the policy bound {bound}")]
    ShiftOutOfPolicy { shift: i64, bound: i64 },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } => 3,
            Error::Inconsistency(_) => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
