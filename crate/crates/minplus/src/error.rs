//! Crate-wide error type.

use std::fmt;

/// Errors produced by polynomial, model and transform operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A point or polynomial had the wrong number of variables.
    ArityMismatch { expected: usize, got: usize },
    /// Two operands live in different semiring modes.
    ModeMismatch,
    /// A negative finite value was used where mode `rplus` requires
    /// nonnegative values.
    NegativeInRPlus,
    /// A structural invariant of a model is violated.
    InvalidModel(String),
    /// A transform received an input outside its domain.
    InvalidInput(String),
    /// A resource budget (term count, node count, hypercube width) was
    /// exceeded.
    BudgetExceeded(String),
    /// A text document failed to parse; `line` is 1-based.
    Parse { line: usize, msg: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ArityMismatch { expected, got } => {
                write!(f, "arity mismatch: expected {expected}, got {got}")
            }
            Error::ModeMismatch => write!(f, "semiring mode mismatch"),
            Error::NegativeInRPlus => {
                write!(f, "negative value not allowed in mode rplus")
            }
            Error::InvalidModel(msg) => write!(f, "invalid model: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::BudgetExceeded(msg) => write!(f, "budget exceeded: {msg}"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
