use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid braid word: {0}")]
    InvalidBraid(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid planar diagram: {0}")]
    InvalidDiagram(String),

    #[error("crossing {index} out of range for a diagram with {count} crossings")]
    InvalidCrossing { index: usize, count: usize },

    #[error("expected a knot, found {0} components")]
    NotAKnot(usize),

    #[error("diagram is not positive ({0} negative crossings)")]
    NotPositive(usize),

    #[error("state has length {got}, diagram has {expected} crossings")]
    StateLength { got: usize, expected: usize },

    #[error("window {lo}:{hi} out of range for {n} crossings")]
    WindowOutOfRange { lo: i64, hi: i64, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation needs a complete (unwindowed) table")]
    WindowedTable,

    #[error("{0} components is too many for subset enumeration")]
    TooManyComponents(usize),

    #[error("estimated {estimate} generators exceeds the budget of {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },

    #[error("out of proven range: {0}")]
    OutOfProvenRange(String),

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
