use thiserror::Error;

/// Errors produced by the phase-selection library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RisError {
    /// The phase alphabet is unusable (too few phases, duplicates).
    #[error("invalid phase alphabet: {0}")]
    InvalidAlphabet(String),

    /// A scalar argument lies outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The phase range admits a uniform full-circle placement, `R >= 2π(K-1)/K`.
    #[error("phase range {range} rad is not below the limit 2π(K-1)/K = {limit} rad for K = {k}")]
    RangeViolation { range: f64, k: usize, limit: f64 },

    /// Channel and configuration disagree on the number of elements.
    #[error("dimension mismatch: expected {expected} elements, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// SNR boost is undefined when the direct link is fully blocked.
    #[error("SNR boost is undefined for a blocked direct link (beta_0 = 0)")]
    UndefinedBoost,

    /// Every channel magnitude is zero.
    #[error("degenerate channel: all magnitudes are zero")]
    DegenerateChannel,

    /// The received vector is zero, so its direction is undefined.
    #[error("received vector is zero; direction undefined")]
    UndefinedDirection,

    /// An exhaustive search would exceed its evaluation budget.
    #[error("search space of {size} assignments exceeds the budget of {budget}")]
    Budget { size: u128, budget: u64 },

    /// An experiment description is inconsistent.
    #[error("invalid experiment configuration: {0}")]
    Config(String),

    /// Reading or writing an external file format failed.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, RisError>;
