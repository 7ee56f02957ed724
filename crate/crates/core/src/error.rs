use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SggError>;

#[derive(Debug, Error)]
pub enum SggError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record at line {line}: {detail}")]
    Record { line: usize, detail: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("vocabulary error: {0}")]
    Vocab(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error(transparent)]
    Autodiff(#[from] sgg_autodiff::AdError),
}

impl SggError {
    /// Stable machine-parseable code for CLI error lines.
    pub fn code(&self) -> &'static str {
        match self {
            SggError::Io { .. } => "E-IO",
            SggError::Record { .. } => "E-RECORD",
            SggError::Config(_) => "E-CONFIG",
            SggError::Vocab(_) => "E-VOCAB",
            SggError::Data(_) => "E-DATA",
            SggError::Checkpoint(_) => "E-CKPT",
            SggError::Diverged(_) => "E-DIVERGED",
            SggError::Decode(_) => "E-DECODE",
            SggError::Eval(_) => "E-EVAL",
            SggError::Autodiff(_) => "E-NUMERIC",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SggError::Io {
            path: path.into(),
            source,
        }
    }
}
