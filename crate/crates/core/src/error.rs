use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a type invariant or an operation precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unit mismatch: `{left}` vs `{right}`")]
    UnitMismatch { left: String, right: String },

    /// The outer lotteries of a continuity triple are indifferent.
    #[error("degenerate ordering: {0}")]
    DegenerateOrdering(String),

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    /// A degenerate lottery has no disagreement window.
    #[error("empty interval: {0}")]
    EmptyInterval(String),

    #[error("row {row}, column `{column}`: {reason}")]
    Parse {
        row: usize,
        column: String,
        reason: String,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
