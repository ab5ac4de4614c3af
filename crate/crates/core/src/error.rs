use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: {0} vs {1} qubits")]
    LengthMismatch(usize, usize),
    #[error("leg {0} is out of range")]
    LegOutOfRange(usize),
    #[error("leg {0} is already contracted")]
    LegReused(usize),
    #[error("cannot contract leg {0} with itself")]
    SelfEdge(usize),
    #[error("contracting legs {0} and {1} projects onto the null state")]
    ContractionInconsistent(usize, usize),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("rows {0} and {1} anticommute")]
    NonCommuting(usize, usize),
    #[error("rank deficient: expected {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },
    #[error("phase tracking is required for {0}")]
    PhaseRequired(&'static str),
    #[error("exact enumeration over 2^{bits} elements exceeds the cap 2^{cap}")]
    ExactModeTooLarge { bits: usize, cap: usize },
    #[error("probability of a trivial syndrome is zero")]
    NormUndefined,
    #[error("MacWilliams transform gave a non-integer coefficient at ({0}, {1})")]
    NonIntegral(usize, usize),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("unknown code id `{0}`")]
    UnknownCode(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("illegal action {0}")]
    IllegalAction(usize),
    #[error("episode is already finished")]
    EpisodeDone,
    #[error("search visited more than {0} nodes")]
    BudgetExceeded(u64),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
