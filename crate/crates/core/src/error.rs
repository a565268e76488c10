use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^61")]
    NotAPrime(i128),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u64),
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("λ must be nonzero")]
    ZeroLambda,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid set spec: {0}")]
    InvalidSpec(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("resource limit for {what}: needs {required}, limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        required: u128,
        limit: u128,
    },
    #[error("io error on {path}: {msg}")]
    Io { path: String, msg: String },
}
