//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by system construction, tracing, entropy estimation,
/// measure diagnostics, and interval-map classification.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A point is not admissible for the system it was paired with
    /// (wrong variant, symbol outside the alphabet, forbidden word, or
    /// coordinate outside the phase space).
    #[error("illegal point for system: {0}")]
    IllegalPoint(String),

    /// A radius / tolerance parameter that must be strictly positive was not.
    #[error("radius must be strictly positive, got {0}")]
    NonPositiveRadius(f64),

    /// A zoo lookup failed.
    #[error("unknown system: {0}")]
    UnknownSystem(String),

    /// A gap schedule with no blocks was supplied.
    #[error("gap schedule must contain at least one block")]
    EmptySchedule,

    /// A schedule entry (block length or gap) that must be >= 1 was not.
    #[error("schedule entry must be >= 1: {what} = {value}")]
    NonPositiveEntry { what: &'static str, value: i64 },

    /// An index was outside the valid range.
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    /// A parameter combination is invalid.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A point claimed to be fixed is moved by the map.
    #[error("point is not fixed: displacement {0}")]
    NotFixedPoint(f64),

    /// No uniform-continuity modulus small enough could be found.
    #[error("continuity modulus search failed at scale {0}")]
    ModulusTooLarge(f64),

    /// A verification horizon is too short for the requested schedule.
    #[error("horizon {horizon} shorter than required span {required}")]
    HorizonTooShort { horizon: usize, required: usize },

    /// The operation does not apply to this system variant.
    #[error("unsupported system for this operation: {0}")]
    UnsupportedSystem(String),

    /// Epsilon is outside the admissible open interval for the operation.
    #[error("epsilon {eps} outside admissible range {lo}..{hi}")]
    InvalidEpsilon { eps: f64, lo: f64, hi: f64 },

    /// A separated family request is internally inconsistent.
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),

    /// A tracing search exhausted its budget; the indices identify the
    /// blocks where every candidate exceeded the mistake budget.
    #[error("search failed; worst blocks {0:?}")]
    SearchFailed(Vec<usize>),

    /// Two family members fail the required pairwise separation.
    #[error("members {0} and {1} not separated: best gap {2}")]
    SeparationFailure(usize, usize, f64),

    /// A formula or spec string failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Convenient result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
