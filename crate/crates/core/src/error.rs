use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Zero has no multiplicative inverse.
    #[error("zero has no inverse in GF({modulus})")]
    ZeroInverse { modulus: u64 },

    /// Vector/matrix shapes do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A message index fell outside `[0, m)` or a set violated its contract.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// A parameter violated a constructor invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An enumeration would exceed the configured work cap.
    #[error("enumeration cap exceeded: {required} required, cap is {cap}")]
    CapExceeded { required: String, cap: u64 },

    /// The pair cannot be decoded with the given matrix.
    #[error("pair ({request}, {side_info:?}) is not decodable in this matrix")]
    NotDecodable {
        request: usize,
        side_info: Vec<usize>,
    },

    /// Inputs to constructive decoding contradict each other.
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    /// The observed pattern is not part of the transmission space.
    #[error("observed pattern is not in the transmission space")]
    ObservedNotInSpace,

    /// A strategy places probability where it must not, or is not a
    /// distribution.
    #[error("invalid strategy: {0}")]
    StrategyViolation(String),

    /// No client pair selects the observed pattern with positive
    /// probability, so the posterior is undefined.
    #[error("observed pattern is selected with probability zero by every pair")]
    UnreachableObservation,

    /// A text-format document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
