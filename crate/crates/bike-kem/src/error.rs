use thiserror::Error;

/// Errors surfaced by the public API.
///
/// Decapsulation never fails with an error on hostile input: decoding
/// failures and re-encryption mismatches route to the implicit-rejection
/// secret instead. Errors here are reserved for misuse (dimension or level
/// mismatches) and malformed serialized objects.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    /// Two ring values of different sizes were combined.
    #[error("ring size mismatch: expected r={expected}, got r={got}")]
    Dimension { expected: u32, got: u32 },

    /// Inversion was requested for an element outside the unit group.
    #[error("element is not invertible (weight must be odd and the element must not be all-ones)")]
    NonInvertible,

    /// A serialized object failed validation before any processing.
    #[error("format error: {0}")]
    Format(String),

    /// An argument violated a parameter-level precondition.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The rejection sampler exhausted its draw budget. With a functioning
    /// XOF this indicates an implementation bug, not bad luck.
    #[error("internal entropy error: rejection sampling exceeded its draw budget")]
    Entropy,

    /// A self-consistency check failed (selftest or profiling harness).
    #[error("self-test failure: {0}")]
    SelfTest(String),
}

impl Error {
    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
