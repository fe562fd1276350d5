use thiserror::Error;

/// Errors raised by the approximation library and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("lambda sequence is not normalized (sum of squares = {mass})")]
    NotNormalized { mass: f64 },

    #[error("lambda sequences of the operands differ")]
    LambdaMismatch,

    #[error(
        "evaluation grid of {requested} points exceeds the budget of {budget}; \
         use a random point set instead"
    )]
    GridBudget { requested: u128, budget: usize },

    #[error("negative radicand {value} in {op} exceeds the rounding tolerance")]
    NegativeRadicand { op: &'static str, value: f64 },

    #[error("non-finite value produced by {op}")]
    NonFinite { op: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        op,
        msg: msg.into(),
    }
}
