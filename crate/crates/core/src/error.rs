use thiserror::Error;

/// Errors raised by the census machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("weights must be positive integers")]
    NonPositiveWeight,

    #[error("empty weight list")]
    EmptyWeights,

    /// The `n` weights other than the one at `index` share the factor `gcd`.
    #[error("not well-formed: weights without index {index} share gcd {gcd}")]
    NotWellFormed { index: usize, gcd: u64 },

    #[error("exponent vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("degree {degree} does not equal weight sum {sum} plus {k}")]
    DegreeMismatch { degree: u64, sum: u64, k: u64 },

    #[error("unsupported singularity configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("one-parameter family {0} does not match any series shape")]
    UnmergeablePiece(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
