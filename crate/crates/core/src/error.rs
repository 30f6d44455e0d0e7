use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base must lie in 2..=65536, got {0}")]
    InvalidBase(u64),

    #[error("digit {digit} is out of range for base {base}")]
    DigitOutOfRange { digit: u64, base: u32 },

    #[error("a block needs at least one digit")]
    EmptyBlock,

    #[error("base mismatch: {left} vs {right}")]
    BaseMismatch { left: u32, right: u32 },

    #[error("enumerating {base}^{len} strings exceeds the cap of {cap}")]
    CapExceeded { base: u32, len: usize, cap: u64 },

    #[error("occurrence count {k} exceeds the configured cap {cap}")]
    CountCapExceeded { k: u32, cap: u32 },

    #[error("rational function has no power series expansion at t = 0")]
    NotExpandable,

    #[error("rational function has a pole at {0}")]
    Pole(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("singular linear system")]
    Singular,

    #[error("linear solve produced a vector that does not satisfy the system")]
    SolveCheckFailed,

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
        }
    }
}
