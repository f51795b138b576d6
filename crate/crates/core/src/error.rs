use thiserror::Error;

/// Errors reported by the solver and its helpers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("signal must contain at least one sample")]
    EmptySignal,

    #[error("sample {index} is not finite ({value})")]
    NonFiniteSample { index: usize, value: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("interval too short for order {k}: length {len}")]
    IntervalTooShort { len: usize, k: usize },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("rotation table exhausted: interval length {needed} exceeds table length {max_length}")]
    TableExhausted { needed: usize, max_length: usize },

    #[error("rotation table does not match the requested mode")]
    ModeMismatch,

    #[error("malformed jump table at position {0}")]
    MalformedJumps(usize),

    #[error("singular normal equations on [{left}, {right}]")]
    SingularSystem { left: usize, right: usize },

    #[error("signal too long for exhaustive search: {len} > {max}")]
    TooLong { len: usize, max: usize },

    #[error("ground truth has zero norm")]
    ZeroNorm,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
