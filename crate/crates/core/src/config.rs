//! Run configuration: a `key = value` text file, overridable by CLI flags.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use crate::error::{Result, SggError};
use crate::model::{GuiderMode, ModelDims};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // model dimensions
    pub embed: usize,
    pub hidden: usize,
    pub guider_k: usize,
    pub vocab_cap: usize,
    pub max_src_len: usize,
    pub max_tgt_len: usize,
    pub mode: GuiderMode,

    // optimizer
    pub lr: f64,
    pub accum_init: f64,
    pub clip_norm: f64,
    pub batch_size: usize,
    pub max_steps: usize,
    pub eval_every: usize,
    pub patience: usize,
    pub stop_train_loss: Option<f64>,
    pub valid_fraction: f64,
    pub seed: u64,

    // decoding
    pub beam_width: usize,
    pub length_norm: bool,
    pub top_n: usize,

    // paths
    pub train: Option<PathBuf>,
    pub valid: Option<PathBuf>,
    pub vocab: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub out: Option<PathBuf>,

    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            embed: 128,
            hidden: 512,
            guider_k: 16,
            vocab_cap: 50_000,
            max_src_len: 400,
            max_tgt_len: 25,
            mode: GuiderMode::Sgg,
            lr: 0.15,
            accum_init: 0.1,
            clip_norm: 2.0,
            batch_size: 32,
            max_steps: 10_000,
            eval_every: 200,
            patience: 3,
            stop_train_loss: None,
            valid_fraction: 0.1,
            seed: 1,
            beam_width: 10,
            length_norm: false,
            top_n: 10,
            train: None,
            valid: None,
            vocab: None,
            checkpoint: None,
            out: None,
            workers: 0,
        }
    }
}

impl RunConfig {
    /// The paper-scale settings.
    pub fn preset_paper() -> Self {
        RunConfig {
            embed: 128,
            hidden: 512,
            vocab_cap: 50_000,
            beam_width: 200,
            ..Default::default()
        }
    }

    /// Desk-scale settings sized so the verification workflow runs in
    /// minutes on a laptop.
    pub fn preset_desk() -> Self {
        RunConfig {
            embed: 16,
            hidden: 32,
            vocab_cap: 512,
            beam_width: 10,
            ..Default::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "desk" => Ok(Self::preset_desk()),
            "paper" => Ok(Self::preset_paper()),
            other => Err(SggError::Config(format!(
                "unknown preset {other:?} (expected desk or paper)"
            ))),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_file(path)?;
        Ok(cfg)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| SggError::io(path, e))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SggError::Config(format!(
                    "{}: line {}: expected key = value",
                    path.display(),
                    i + 1
                ))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Set one key; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| {
                SggError::Config(format!("invalid value {value:?} for key {key:?}"))
            })
        }
        match key {
            "preset" => *self = Self::preset(value)?,
            "embed" => self.embed = parse(key, value)?,
            "hidden" => self.hidden = parse(key, value)?,
            "guider_k" => self.guider_k = parse(key, value)?,
            "vocab_cap" => self.vocab_cap = parse(key, value)?,
            "max_src_len" => self.max_src_len = parse(key, value)?,
            "max_tgt_len" => self.max_tgt_len = parse(key, value)?,
            "mode" => {
                self.mode = GuiderMode::parse(value).ok_or_else(|| {
                    SggError::Config(format!(
                        "invalid mode {value:?} (expected sgg, sg-ablation or guider-variant)"
                    ))
                })?
            }
            "lr" => self.lr = parse(key, value)?,
            "accum_init" => self.accum_init = parse(key, value)?,
            "clip_norm" => self.clip_norm = parse(key, value)?,
            "batch_size" => self.batch_size = parse(key, value)?,
            "max_steps" => self.max_steps = parse(key, value)?,
            "eval_every" => self.eval_every = parse(key, value)?,
            "patience" => self.patience = parse(key, value)?,
            "stop_train_loss" => self.stop_train_loss = Some(parse(key, value)?),
            "valid_fraction" => self.valid_fraction = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "beam_width" => self.beam_width = parse(key, value)?,
            "length_norm" => self.length_norm = parse(key, value)?,
            "top_n" => self.top_n = parse(key, value)?,
            "train" => self.train = Some(PathBuf::from(value)),
            "valid" => self.valid = Some(PathBuf::from(value)),
            "vocab" => self.vocab = Some(PathBuf::from(value)),
            "checkpoint" => self.checkpoint = Some(PathBuf::from(value)),
            "out" => self.out = Some(PathBuf::from(value)),
            "workers" => self.workers = parse(key, value)?,
            other => {
                return Err(SggError::Config(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("embed", self.embed),
            ("hidden", self.hidden),
            ("guider_k", self.guider_k),
            ("max_src_len", self.max_src_len),
            ("max_tgt_len", self.max_tgt_len),
            ("batch_size", self.batch_size),
            ("beam_width", self.beam_width),
            ("top_n", self.top_n),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(SggError::Config(format!("{name} must be positive")));
            }
        }
        if self.vocab_cap < crate::text::RESERVED.len() {
            return Err(SggError::Config(format!(
                "vocab_cap must be at least {}",
                crate::text::RESERVED.len()
            )));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(SggError::Config("lr must be positive".into()));
        }
        if !(self.accum_init > 0.0 && self.accum_init.is_finite()) {
            return Err(SggError::Config("accum_init must be positive".into()));
        }
        if !(self.clip_norm > 0.0 && self.clip_norm.is_finite()) {
            return Err(SggError::Config("clip_norm must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.valid_fraction) {
            return Err(SggError::Config(
                "valid_fraction must be in [0, 1)".into(),
            ));
        }
        Ok(())
    }

    pub fn dims(&self, vocab_size: usize) -> ModelDims {
        ModelDims {
            vocab: vocab_size,
            embed: self.embed,
            hidden: self.hidden,
            guider_k: self.guider_k,
            max_src_len: self.max_src_len,
            max_tgt_len: self.max_tgt_len,
        }
    }
}
