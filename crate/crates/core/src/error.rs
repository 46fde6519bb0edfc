use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus {0}: must be a prime in [3, 2^63)")]
    InvalidModulus(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("zero has no multiplicative order")]
    ZeroElement,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("operands live in different rings")]
    ParamMismatch,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dimension {0} too small (need a power of two >= 16)")]
    NTooSmall(usize),
    #[error("polynomial is not squarefree")]
    NonSquarefree,
    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("root order {order} exceeds the budget {max}")]
    OrderTooLarge { order: u64, max: u64 },
    #[error("rejection loop exceeded {0} iterations")]
    RejectionOverflow(usize),
    #[error("modulus chain overflows 2^62")]
    ChainOverflow,
    #[error("ciphertext noise exceeds the decryption bound")]
    DecryptFail,
    #[error("level {level} exceeds the cap {max}")]
    LevelExceeded { level: usize, max: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
