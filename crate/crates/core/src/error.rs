use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension limit exceeded: {what} = {value} (cap {cap})")]
    DimensionLimit {
        what: &'static str,
        value: u128,
        cap: u128,
    },

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("invalid layout: {0}")]
    Layout(String),

    #[error("not a valid state: {0}")]
    NotAState(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("isometry contract violated: {0}")]
    NotAnIsometry(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("infeasible conversion: {0}")]
    InfeasibleConversion(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
