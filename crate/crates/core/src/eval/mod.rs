//! Evaluation: macro-averaged F1@k for present keyphrases, Recall@k for
//! absent keyphrases under Porter stemming, and the absent/overlap
//! proportion diagnostics.

mod metrics;
mod report;

pub use metrics::{
    absent_proportion, f1_at_k, overlap_proportion, phrases_overlap, recall_at_k, PrfScores,
};
pub use report::{evaluate_corpus, render_table, EvalReport};
