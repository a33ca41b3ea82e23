use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse {input:?} as a decimal number: {reason}")]
    Parse { input: String, reason: &'static str },

    #[error("decimal_digits must be at least 1")]
    ZeroDigits,

    #[error("input vector needs at least 2 entries, got {0}")]
    Dimension(usize),

    #[error("input entry {0} is zero; every entry must be nonzero")]
    ZeroEntry(usize),

    #[error("norm bound must be positive")]
    NonPositiveBound,

    #[error("gamma must exceed 2/sqrt(3)")]
    InvalidGamma,

    #[error("pivot row {r} outside the active window {k}..{last}")]
    PivotOutOfWindow { r: usize, k: usize, last: usize },

    #[error("window already spans the whole vector")]
    CannotExtend,

    #[error("precision exhausted: {0}; retry with more digits")]
    PrecisionExhausted(String),

    #[error("zero relation vector")]
    ZeroRelation,

    #[error("oracle refused: {0}")]
    OracleGuard(String),

    #[error("invalid request: {0}")]
    InvalidRequest(String),
}
