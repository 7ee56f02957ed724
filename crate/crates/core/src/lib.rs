//! Select-guide-generate keyphrase generation.
//!
//! A hierarchical sequence-to-sequence model that treats present and absent
//! keyphrases as two separate generation problems: a pointing selector emits
//! present keyphrases as source positions, a static guider accumulates the
//! selector's attention to mark what has already been selected, and a
//! pointer-generator produces absent keyphrases conditioned on the guider.
//!
//! The crate covers the full desk-scale workflow: corpus ingestion and
//! target assembly, vocabulary construction, training with Adagrad and
//! global-norm clipping, beam-search decoding, and the evaluation metrics
//! (macro F1@k, Recall@k with Porter stemming, absent/overlap proportions).

pub mod config;
pub mod data;
pub mod decode;
pub mod error;
pub mod eval;
pub mod model;
pub mod text;
pub mod train;

pub use error::{Result, SggError};
