use thiserror::Error;

pub type Result<T> = std::result::Result<T, AdError>;

#[derive(Debug, Error)]
pub enum AdError {
    #[error("{op}: shape mismatch ({detail})")]
    ShapeMismatch { op: &'static str, detail: String },

    #[error("{op}: empty input")]
    EmptyInput { op: &'static str },

    #[error("{op}: non-finite input")]
    NonFinite { op: &'static str },

    #[error("{op}: index {index} out of bounds for length {len}")]
    IndexOutOfBounds {
        op: &'static str,
        index: usize,
        len: usize,
    },

    #[error("backward called twice without reset_grads")]
    BackwardWithoutReset,

    #[error("backward requires a scalar loss, got {numel} elements")]
    NonScalarLoss { numel: usize },

    #[error("variable belongs to a different tape")]
    ForeignVar,
}
