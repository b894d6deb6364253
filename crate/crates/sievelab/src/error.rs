use thiserror::Error;

/// Errors reported by the library. Precondition violations surface here
/// rather than panicking so the CLI can map them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid range: lo={lo} must be strictly below hi={hi}")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("range of {span} integers exceeds the sieve memory cap of {cap}")]
    RangeTooLarge { span: u64, cap: u64 },

    #[error("64-bit overflow while computing {0}")]
    Overflow(&'static str),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("epsilon must lie in (0, 1], got {0}")]
    InvalidEpsilon(f64),

    #[error("tuple offsets must be strictly increasing and non-empty")]
    InvalidTuple,

    #[error("tuple is inadmissible")]
    InadmissibleTuple,

    #[error("candidate list exhausted after accepting {accepted} of {needed} offsets")]
    CandidatesExhausted { accepted: usize, needed: usize },

    #[error("window {index} admits no offset that keeps the tuple admissible")]
    WindowExhausted { index: usize },

    #[error("truncation prime {p0} is below the required threshold {required}")]
    TruncationTooSmall { p0: u64, required: u64 },

    #[error("Brun-Titchmarsh bound needs y >= 3, got y={0}")]
    DegenerateBound(u64),

    #[error("window length {0} is too short (need at least 3 for log T)")]
    DegenerateWindow(u64),

    #[error("shift {h0} exceeds the 4N limit {limit}")]
    ShiftTooLarge { h0: u64, limit: u64 },

    #[error("R={r} exceeds the divisor-table cap {cap} for the swapped strategy")]
    RTooLarge { r: u64, cap: u64 },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
