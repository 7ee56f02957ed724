use std::io::Write;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::Serialize;
use sgg_autodiff::Tape;

use crate::data::TrainingSample;
use crate::error::{Result, SggError};
use crate::model::{GuiderMode, ModelDims, ModelParams, TracedModel};
use crate::train::{clip_gradients, save_checkpoint, Adagrad, CheckpointMeta};

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub lr: f64,
    pub accum_init: f64,
    pub clip_norm: f64,
    pub batch_size: usize,
    pub max_steps: usize,
    pub eval_every: usize,
    /// Consecutive evaluations without improvement before stopping;
    /// 0 disables early stopping.
    pub patience: usize,
    /// Stop once the full training set reaches this per-token loss.
    pub stop_train_loss: Option<f64>,
    pub seed: u64,
    pub checkpoint_path: Option<PathBuf>,
    pub log_path: Option<PathBuf>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            lr: 0.15,
            accum_init: 0.1,
            clip_norm: 2.0,
            batch_size: 32,
            max_steps: 2000,
            eval_every: 200,
            patience: 3,
            stop_train_loss: None,
            seed: 1,
            checkpoint_path: None,
            log_path: None,
        }
    }
}

/// One line of the structured training log.
#[derive(Debug, Clone, Serialize)]
pub struct StepLog {
    pub step: usize,
    pub l_present: f64,
    pub l_absent: f64,
    pub total: f64,
    pub per_token: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxSteps,
    TrainLossTarget,
    EarlyStopping,
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub steps_run: usize,
    pub loss_curve: Vec<StepLog>,
    pub best_valid_loss: Option<f64>,
    pub final_train_per_token: f64,
    pub stopped: StopReason,
}

/// Mean summed loss and per-token loss over a sample set (forward only).
pub fn evaluate_loss(
    params: &ModelParams<f32>,
    dims: &ModelDims,
    mode: GuiderMode,
    samples: &[TrainingSample],
) -> Result<(f64, f64)> {
    let mut total = 0.0f64;
    let mut tokens = 0usize;
    for sample in samples {
        let tape: Tape<f32> = Tape::new();
        let tm = TracedModel::new(&tape, params, *dims, mode)?;
        let loss = tm.compute_loss(sample)?;
        total += loss.total.value() as f64;
        tokens += loss.token_count();
    }
    Ok((total, total / tokens.max(1) as f64))
}

/// Shuffled mini-batches bucketed by source length: sort by length, chunk,
/// then shuffle the batch order.
fn make_batches(
    n: usize,
    lengths: &[usize],
    batch_size: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.sort_by_key(|&i| lengths[i]);
    let mut batches: Vec<Vec<usize>> = order
        .chunks(batch_size)
        .map(|chunk| chunk.to_vec())
        .collect();
    batches.shuffle(rng);
    batches
}

/// Run the training loop: per step, forward the batch on one tape, backward,
/// clip to the global-norm budget and apply Adagrad. Divergence (non-finite
/// loss or gradients) aborts with the last good checkpoint retained on disk.
pub fn train(
    params: &mut ModelParams<f32>,
    dims: &ModelDims,
    mode: GuiderMode,
    train_set: &[TrainingSample],
    valid_set: &[TrainingSample],
    opts: &TrainOptions,
    vocab_hash: [u8; 32],
) -> Result<TrainOutcome> {
    if train_set.is_empty() {
        return Err(SggError::Data("training set is empty".into()));
    }
    let meta = CheckpointMeta {
        dims: *dims,
        mode,
        vocab_hash,
    };
    let mut log_file = match &opts.log_path {
        Some(p) => Some(std::fs::File::create(p).map_err(|e| SggError::io(p, e))?),
        None => None,
    };

    let lengths: Vec<usize> = train_set.iter().map(|s| s.source_ids.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut optimizer = Adagrad::new(params, opts.lr, opts.accum_init);

    let mut curve: Vec<StepLog> = Vec::new();
    let mut best_valid: Option<f64> = None;
    let mut evals_without_improvement = 0usize;
    let mut step = 0usize;
    let mut stopped = StopReason::MaxSteps;

    'training: while step < opts.max_steps {
        let batches = make_batches(train_set.len(), &lengths, opts.batch_size, &mut rng);
        for batch in batches {
            if step >= opts.max_steps {
                break 'training;
            }
            step += 1;

            let tape: Tape<f32> = Tape::new();
            let tm = TracedModel::new(&tape, params, *dims, mode)?;
            let mut batch_total: Option<sgg_autodiff::Var<'_, f32>> = None;
            let mut l_present = 0.0f64;
            let mut l_absent = 0.0f64;
            let mut tokens = 0usize;
            for &si in &batch {
                let loss = tm.compute_loss(&train_set[si])?;
                l_present += loss.l_present.value() as f64;
                l_absent += loss.l_absent.value() as f64;
                tokens += loss.token_count();
                batch_total = Some(match batch_total {
                    None => loss.total,
                    Some(acc) => acc.add(loss.total)?,
                });
            }
            let batch_total = batch_total.expect("non-empty batch");
            tape.backward(batch_total)?;
            let mut grads = tm.block_grads();
            let grad_norm = clip_gradients(&mut grads, opts.clip_norm)?;
            optimizer.update(params, &grads)?;

            let total = batch_total.value() as f64;
            let per_token = total / tokens.max(1) as f64;
            let entry = StepLog {
                step,
                l_present,
                l_absent,
                total,
                per_token,
                grad_norm,
            };
            if let Some(f) = log_file.as_mut() {
                let line = serde_json::to_string(&entry).expect("log serializes");
                writeln!(f, "{line}").map_err(|e| {
                    SggError::io(opts.log_path.clone().unwrap_or_default(), e)
                })?;
            }
            curve.push(entry);

            // loss-target stop: confirm on the full training set
            if let Some(target) = opts.stop_train_loss {
                if per_token < target {
                    let (_, per_token) = evaluate_loss(params, dims, mode, train_set)?;
                    if per_token < target {
                        stopped = StopReason::TrainLossTarget;
                        break 'training;
                    }
                }
            }

            // periodic validation + best checkpoint + early stopping
            if !valid_set.is_empty() && opts.eval_every > 0 && step % opts.eval_every == 0 {
                let (valid_total, _) = evaluate_loss(params, dims, mode, valid_set)?;
                let improved = best_valid.map(|b| valid_total < b).unwrap_or(true);
                if improved {
                    best_valid = Some(valid_total);
                    evals_without_improvement = 0;
                    if let Some(p) = &opts.checkpoint_path {
                        save_checkpoint(p, params, &meta)?;
                    }
                } else {
                    evals_without_improvement += 1;
                    if opts.patience > 0 && evals_without_improvement >= opts.patience {
                        stopped = StopReason::EarlyStopping;
                        break 'training;
                    }
                }
            }
        }
    }

    // without a validation pass the final parameters are the checkpoint
    if valid_set.is_empty() || best_valid.is_none() {
        if let Some(p) = &opts.checkpoint_path {
            save_checkpoint(p, params, &meta)?;
        }
    }
    let (_, final_per_token) = evaluate_loss(params, dims, mode, train_set)?;

    Ok(TrainOutcome {
        steps_run: step,
        loss_curve: curve,
        best_valid_loss: best_valid,
        final_train_per_token: final_per_token,
        stopped,
    })
}
