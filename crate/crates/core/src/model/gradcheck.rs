//! Full-model gradient verification: analytic gradients of the joint loss
//! against central finite differences in f64.

use sgg_autodiff::Tape;

use crate::data::TrainingSample;
use crate::error::Result;
use crate::model::{GuiderMode, ModelDims, ModelParams, TracedModel};
use crate::text::{TokenId, EOS, SEP, UNK};

#[derive(Debug, Clone)]
pub struct BlockReport {
    pub name: &'static str,
    pub max_rel_err: f64,
    pub params_checked: usize,
}

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub blocks: Vec<BlockReport>,
    pub step: f64,
}

impl GradCheckReport {
    pub fn worst(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.max_rel_err)
            .fold(0.0, f64::max)
    }
}

fn batch_loss(
    params: &ModelParams<f64>,
    dims: &ModelDims,
    mode: GuiderMode,
    samples: &[TrainingSample],
) -> Result<f64> {
    let mut total = 0.0;
    for s in samples {
        let tape: Tape<f64> = Tape::new();
        let tm = TracedModel::new(&tape, params, *dims, mode)?;
        total += tm.compute_loss(s)?.total.value();
    }
    Ok(total)
}

/// Relative error with a floor that keeps finite-difference noise on
/// near-zero gradients from dominating.
fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Compare every parameter coordinate's analytic gradient of the summed
/// joint loss against a central finite difference with the given step.
pub fn gradient_check(
    params: &ModelParams<f64>,
    dims: &ModelDims,
    mode: GuiderMode,
    samples: &[TrainingSample],
    step: f64,
) -> Result<GradCheckReport> {
    // analytic gradients for the whole batch on one tape
    let tape: Tape<f64> = Tape::new();
    let tm = TracedModel::new(&tape, params, *dims, mode)?;
    let mut total = None;
    for s in samples {
        let loss = tm.compute_loss(s)?.total;
        total = Some(match total {
            None => loss,
            Some(acc) => acc.add(loss)?,
        });
    }
    let total = total.expect("non-empty sample set");
    tape.backward(total)?;
    let analytic = tm.block_grads();

    let block_shapes: Vec<(&'static str, usize)> = params
        .blocks()
        .iter()
        .map(|(n, b)| (*n, b.numel()))
        .collect();

    let mut work = params.clone();
    let mut blocks = Vec::with_capacity(block_shapes.len());
    for (bi, (name, numel)) in block_shapes.iter().enumerate() {
        let mut max_rel = 0.0f64;
        for ci in 0..*numel {
            let original = work.blocks()[bi].1.data[ci];
            work.blocks_mut()[bi].1.data[ci] = original + step;
            let plus = batch_loss(&work, dims, mode, samples)?;
            work.blocks_mut()[bi].1.data[ci] = original - step;
            let minus = batch_loss(&work, dims, mode, samples)?;
            work.blocks_mut()[bi].1.data[ci] = original;
            let fd = (plus - minus) / (2.0 * step);
            max_rel = max_rel.max(rel_err(analytic[bi].1[ci], fd));
        }
        blocks.push(BlockReport {
            name,
            max_rel_err: max_rel,
            params_checked: *numel,
        });
    }
    Ok(GradCheckReport { blocks, step })
}

/// Deterministic toy setup for gradient verification: source length 6,
/// vocabulary 20, embedding 4, hidden 5, two samples exercising words,
/// separators, eos, an OOV source word and an extended-id absent target.
pub fn toy_setup() -> (ModelDims, Vec<TrainingSample>) {
    let dims = ModelDims {
        vocab: 20,
        embed: 4,
        hidden: 5,
        guider_k: 3,
        max_src_len: 400,
        max_tgt_len: 25,
    };
    let v = dims.vocab as TokenId;
    let w = |i: u32| 5 + i;
    let samples = vec![
        TrainingSample {
            source_ids: vec![w(0), w(1), w(2), UNK, w(3), w(1)],
            source_ext_ids: vec![w(0), w(1), w(2), v, w(3), w(1)],
            ext_words: vec!["oovword".into()],
            present_target: vec![w(1), w(2), SEP, w(3), EOS],
            absent_target: vec![w(4), v, EOS],
            present_copy_positions: vec![vec![1, 5], vec![2], vec![], vec![4], vec![]],
        },
        TrainingSample {
            source_ids: vec![w(3), w(4), w(0), w(5), w(6), w(2)],
            source_ext_ids: vec![w(3), w(4), w(0), w(5), w(6), w(2)],
            ext_words: vec![],
            present_target: vec![w(4), EOS],
            absent_target: vec![EOS],
            present_copy_positions: vec![vec![1], vec![]],
        },
    ];
    (dims, samples)
}
