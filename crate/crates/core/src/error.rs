use thiserror::Error;

/// Broad category of an [`Error`], used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: bad tuples, bad files, out-of-range parameters.
    Input,
    /// A resource guard refused the request.
    Guard,
    /// The input was checked and found not to be a valid colouring function.
    Rejected,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("identifier space must be non-empty (n >= 1)")]
    EmptyIdSpace,

    #[error("arity must be at least 1")]
    ZeroArity,

    #[error("colour count must be at least 1")]
    ZeroColours,

    #[error("tuple {tuple:?} is not strictly increasing over 1..={n}")]
    InvalidTuple { tuple: Vec<u32>, n: u32 },

    #[error("tuple {tuple:?} does not have arity {expected}")]
    ArityMismatch { tuple: Vec<u32>, expected: usize },

    #[error("rank {rank} out of range (table has {size} entries)")]
    RankOutOfRange { rank: u64, size: u64 },

    #[error("table has {got} entries but C({n},{k}) = {expected}")]
    NotTotal {
        n: u32,
        k: usize,
        expected: u64,
        got: u64,
    },

    #[error("colour {colour} at rank {rank} outside 1..={colour_count}")]
    ColourOutOfRange {
        rank: u64,
        colour: u32,
        colour_count: u32,
    },

    #[error("operation needs arity {needed}, got {got}")]
    WrongArity { needed: &'static str, got: usize },

    #[error("table of {entries} entries exceeds guard of {limit}")]
    TableTooLarge { entries: String, limit: u64 },

    #[error("colour count {colour_count} exceeds guard of {limit}")]
    ColourCountTooLarge { colour_count: String, limit: u64 },

    #[error("speedup stopped at step {step} (arity {arity}): next colour count {colour_count} exceeds guard")]
    TraceGuard {
        step: usize,
        arity: usize,
        colour_count: String,
    },

    #[error("input is not a valid colouring function ({} violating tuple(s))", .0.total_violations)]
    InvalidInput(Box<crate::colouring::ValidityReport>),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    #[error("cycle of length {n} is too short for radius {radius} (need n >= {needed})")]
    CycleTooShort { n: u32, radius: usize, needed: u64 },

    #[error("rule returned colour {colour} outside {{1,2,3}} on {window:?}")]
    RuleOutput { window: Vec<u32>, colour: u32 },

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::TableTooLarge { .. }
            | Error::ColourCountTooLarge { .. }
            | Error::TraceGuard { .. } => ErrorKind::Guard,
            Error::InvalidInput(_) => ErrorKind::Rejected,
            _ => ErrorKind::Input,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
