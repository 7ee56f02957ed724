//! Beam-search inference, phrase extraction, and the two-stage prediction
//! pipeline.

mod beam;
mod phrases;
mod predict;

pub use beam::{
    beam_search, greedy_decode, replay_score, BeamParams, Hypothesis, StepCandidates, StepModel,
};
pub use phrases::{extract_phrases, is_present, PresenceMode};
pub use predict::{
    predict_corpus, predict_record, read_predictions, write_predictions, DocPrediction, Predictor,
};
