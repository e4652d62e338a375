use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero input where a nonzero value is required")]
    ZeroInput,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("mismatched parameters: {0}")]
    Mismatch(String),
    #[error("no stabilization within budget: {0}")]
    NonStabilization(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
