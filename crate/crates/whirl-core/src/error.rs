//! Crate-wide error type.

/// Errors reported by series construction, the solver, and the analysis
/// pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },

    #[error("sample rate mismatch: {left} Hz vs {right} Hz")]
    SampleRateMismatch { left: f64, right: f64 },

    #[error("series too short: {len} samples (need at least 2)")]
    TooShort { len: usize },

    #[error("invalid sample rate: {0} Hz (must be positive and finite)")]
    InvalidSampleRate(f64),

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("zero-energy input: {context}")]
    ZeroEnergy { context: &'static str },

    #[error("record must contain at least one section")]
    EmptyRecord,

    #[error("label count {labels} does not match section count {sections}")]
    LabelCountMismatch { labels: usize, sections: usize },

    #[error("no input channels")]
    NoChannels,

    #[error("unknown init scheme \"{0}\" (expected uniform-spread, zero, or octave)")]
    UnknownInitScheme(String),

    #[error("invalid solver config: {reason}")]
    InvalidConfig { reason: String },

    #[error("{what} index {index} out of range (count {count})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        count: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
