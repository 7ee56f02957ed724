//! The select-guide-generate network: bi-LSTM encoder, pointing selector,
//! guider accumulation, and selection-guided pointer-generator.

pub mod gradcheck;
mod net;
mod params;

pub use net::{
    lstm_cell, AttentionResult, DecoderState, EncodedDoc, GeneratorSession, Guider,
    LossBreakdown, MixtureDistribution, Stage, TracedModel,
};
pub use params::{init_params, ModelParams, ParamBlock};

use serde::{Deserialize, Serialize};

/// How the guider feeds the generator's attention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GuiderMode {
    /// Each position's accumulated mass enters that position's attention
    /// score through a learned expansion.
    Sgg,
    /// Guider input zeroed: selector and generator only.
    SgAblation,
    /// The guider-weighted encoder context is projected once per step and
    /// added to every position's score.
    GuiderVariant,
}

impl GuiderMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sgg" => Some(GuiderMode::Sgg),
            "sg-ablation" => Some(GuiderMode::SgAblation),
            "guider-variant" => Some(GuiderMode::GuiderVariant),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            GuiderMode::Sgg => "sgg",
            GuiderMode::SgAblation => "sg-ablation",
            GuiderMode::GuiderVariant => "guider-variant",
        }
    }
}

/// Network dimensions. The attention score dimension equals `hidden`; the
/// guider expansion width is `guider_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDims {
    pub vocab: usize,
    pub embed: usize,
    pub hidden: usize,
    pub guider_k: usize,
    pub max_src_len: usize,
    pub max_tgt_len: usize,
}

impl ModelDims {
    pub fn attn(&self) -> usize {
        self.hidden
    }
}
