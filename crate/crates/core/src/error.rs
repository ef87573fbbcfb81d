use std::fmt;

/// Failure conditions surfaced by the higher-level algorithms.
///
/// Plain enclosure degradation (a result with infinite radius) is not an
/// error: it is a valid, if useless, answer. `Error` is reserved for cases
/// where no enclosure can be produced at all, or where producing one would
/// require violating a caller-visible contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The input violates a documented precondition.
    InvalidInput(String),
    /// Newton refinement could not certify a contraction; the caller should
    /// supply a tighter isolating interval or raise the working precision.
    RefineFailed(String),
    /// An internal consistency check failed. This signals a bug in the
    /// library, not a property of the inputs.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::RefineFailed(m) => write!(f, "refinement failed: {m}"),
            Error::Internal(m) => write!(f, "internal inconsistency: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
