use thiserror::Error;

/// Errors raised across the analysis and design pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("index {index} out of range for {len} members")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("member {member} has no assigned section")]
    MissingSection { member: usize },

    #[error("stiffness matrix is singular")]
    Singular,

    #[error("no catalog section satisfies member {member} (best utilisation {utilisation:.3})")]
    NoFeasibleSection { member: usize, utilisation: f64 },

    #[error("section assignment did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("degenerate design: true utilisation of member {member} is zero")]
    Degenerate { member: usize },

    #[error("{what} too large: {value} (limit {limit})")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Singular | Error::NonConvergence { .. } | Error::Degenerate { .. } => 3,
            Error::NoFeasibleSection { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
