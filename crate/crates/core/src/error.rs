use thiserror::Error;

/// Errors produced by configuration validation and the slot recursion contracts.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configuration field is out of its documented range.
    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    /// The estimator was asked to process a slot index that does not follow
    /// its internal clock, which would silently corrupt the recursion.
    #[error("estimator desynchronized: engine clock at slot {engine}, state expects slot {expected}")]
    EstimatorDesync { engine: u64, expected: u64 },

    /// Decode feedback was present on a silent slot or missing on a transmit slot.
    #[error("feedback contract violation: {0}")]
    FeedbackContract(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field,
        reason: reason.into(),
    }
}
