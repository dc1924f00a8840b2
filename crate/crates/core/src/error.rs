use thiserror::Error;

/// Errors raised by domain-type constructors and validators.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A numeric score was outside the {0.0, 0.5, 1.0} domain.
    #[error("invalid three-level score {0}: must be exactly 0.0, 0.5, or 1.0")]
    InvalidScore(f64),

    /// A subdimension was paired with a dimension it does not belong to.
    #[error("subdimension {subdimension} does not belong to dimension {dimension}")]
    DimensionMismatch {
        dimension: String,
        subdimension: String,
    },

    /// Caller violated a structural precondition (empty input, arity
    /// mismatch, inconsistent record). These indicate programming errors,
    /// not recoverable data conditions.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A serialized terminal-state string could not be parsed.
    #[error("malformed terminal state string {input:?}: {reason}")]
    MalformedTerminalStates { input: String, reason: String },
}
