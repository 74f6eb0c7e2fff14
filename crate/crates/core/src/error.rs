use thiserror::Error;

/// Errors raised by sequence, expansion, counting, construction, and
/// experiment operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sequence descriptor `{0}`: {1}")]
    InvalidDescriptor(String, String),

    #[error("value {0} outside the unit interval [0, 1)")]
    OutsideUnitInterval(String),

    #[error("digit prefix too short: need {required} digits, have {available}")]
    InsufficientPrefix { required: u64, available: u64 },

    #[error("horizon {horizon} is below k = {k}")]
    InvalidHorizon { horizon: u64, k: u32 },

    #[error("block enumeration of {size} entries exceeds cap {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },

    #[error("word of {size} digits exceeds materialization cap {cap}")]
    MaterializationCapExceeded { size: u128, cap: u128 },

    #[error(
        "bias unachievable for C({b},{w}): zeros at odd positions {zeros_odd} < 2 * {ones_odd}"
    )]
    BiasUnachievable {
        b: u64,
        w: u64,
        zeros_odd: String,
        ones_odd: String,
    },

    #[error("position {position} lies beyond the last scheduled stage (length {schedule_len})")]
    BeyondSchedule {
        position: String,
        schedule_len: String,
    },

    #[error("digit {digit} at position {position} out of range for q = {q}")]
    DigitOutOfRange {
        position: u64,
        digit: String,
        q: String,
    },

    #[error("digit file malformed: {0}")]
    MalformedDigitFile(String),

    #[error("word length {got} does not match expected {expected}")]
    WordLengthMismatch { got: u64, expected: u64 },

    #[error("prefix lengths differ: source has {got}, target expects {expected}")]
    PrefixLengthMismatch { got: u64, expected: u64 },

    #[error("inconsistent weighting table: {0}")]
    InconsistentWeighting(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("{0} is too large to represent")]
    ValueTooLarge(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
