use thiserror::Error;

/// Errors raised by the library.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),

    #[error("modulus {0:?} is reducible over the prime field")]
    Reducible(Vec<u32>),

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("division by zero")]
    DivideByZero,

    #[error("field order {0} is not a square of a prime power")]
    NotASquare(u32),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("kernel matrix is singular")]
    SingularKernel,

    #[error("computation too large: {0}")]
    TooLarge(String),

    #[error("operands live in different fields")]
    FieldMismatch,

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("channel is not symmetric w.r.t. the field operations")]
    NotSymmetric,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("index set is not decreasing")]
    NotDecreasing,

    #[error("no isometry vector exists for this curve")]
    NoIsometry,

    #[error("invalid channel: {0}")]
    InvalidChannel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
