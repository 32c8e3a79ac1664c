use thiserror::Error;

use crate::fusion::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("level {level} supertile of `{label}` has {tiles} tiles, above the budget of {budget}")]
    TileBudget {
        label: String,
        level: u32,
        tiles: u128,
        budget: u64,
    },

    #[error("{what} exceeds the budget of {budget}")]
    Budget { what: String, budget: u64 },

    #[error("level {level} is not available: {reason}")]
    Level { level: u32, reason: String },

    #[error("length symbol overflow at level {0}")]
    Overflow(u32),

    #[error("the rule declares no involution")]
    NoInvolution,

    #[error("invalid substitution: {0}")]
    Substitution(String),

    #[error("root finding did not converge after {0} iterations")]
    NonConvergence(usize),

    #[error("cochain table has no value for pattern {0:016x}")]
    MissingPattern(u64),

    #[error("edge at ({x}, {y}) is outside the safe interior")]
    OutsideInterior { x: i64, y: i64 },

    #[error("north span {north} does not match south span {south}")]
    SpanMismatch { north: i64, south: i64 },

    #[error("{0}")]
    Invalid(String),
}
