use thiserror::Error;

/// Errors raised by construction and arithmetic contracts across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("characteristic 2 is not supported (the diagonalisation divides by 2)")]
    EvenCharacteristic,
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("extension degree {0} requires an explicit modulus")]
    MissingModulus(usize),
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("sequence length {got} does not match {rows}x{cols} Hankel shape (want {want})")]
    LengthMismatch { rows: usize, cols: usize, want: usize, got: usize },
    #[error("submatrix selection out of range")]
    OutOfRange,
    #[error("invalid block partition: {0}")]
    InvalidPartition(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("polynomial degree violates the contract: {0}")]
    BadDegree(String),
    #[error("gamma must be a nonzero field element")]
    GammaZero,
    #[error("cannot parse {what}: {text:?}")]
    Parse { what: &'static str, text: String },
}
