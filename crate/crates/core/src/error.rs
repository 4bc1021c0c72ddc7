use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid demand curve: {0}")]
    InvalidCurve(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("price must be a finite nonnegative number, got {0}")]
    NegativePrice(f64),

    #[error("no price yields quantity {quantity}: it exceeds Q(0) = {max}")]
    NoSolution { quantity: f64, max: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no demand: Q(0) = 0")]
    NoDemand,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("trajectory too short: {len} rounds, need at least {min}")]
    TrajectoryTooShort { len: usize, min: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
