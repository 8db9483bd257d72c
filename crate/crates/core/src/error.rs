use thiserror::Error;

/// Errors raised by constructions and analyses in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("p not prime: {0}")]
    NotPrime(u64),
    #[error("p must be an odd prime, got {0}")]
    NotOddPrime(u64),
    #[error("k = {k} does not divide p - 1 = {}", p - 1)]
    NotDivisor { p: u64, k: u64 },
    #[error("invalid order k = {k} for p = {p}: {reason}")]
    InvalidOrder { p: u64, k: u64, reason: &'static str },
    #[error("{what} requires a non-trivial character (h = {h} is 0 mod k = {k})")]
    TrivialCharacter { what: &'static str, k: u64, h: i64 },
    #[error("{what} requires a nonzero field element")]
    ZeroElement { what: &'static str },
    #[error("column index {index} out of range for N = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid index sets: {0}")]
    InvalidSubsets(String),
    #[error("enumeration needs {required} evaluations, budget is {budget}; use sampled mode")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operation requires the power-residue variant")]
    WrongVariant,
    #[error("Gram matrix on support {support:?} is numerically singular (condition estimate {condition:e})")]
    SingularSupport { support: Vec<usize>, condition: f64 },
    #[error("iterative hard thresholding diverged at iteration {iteration} (iterate norm {norm:e})")]
    Diverged { iteration: usize, norm: f64 },
    #[error("malformed matrix file: {0}")]
    MatrixFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
