use alloc::string::String;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("cycle length {len} is outside the oracle range 3..={cap}")]
    LengthOutOfRange { len: usize, cap: usize },

    #[error("oracle budget of {budget} search steps exhausted")]
    BudgetExceeded { budget: u64 },

    #[error("protocol sent a message from {from} to non-neighbor {to} in round {round}")]
    NonIncidentEdge { from: usize, to: usize, round: usize },

    #[error("generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: u32, reason: String },

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("instance shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidParameter(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
