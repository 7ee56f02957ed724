use sgg_autodiff::Real;

use crate::error::{Result, SggError};
use crate::model::ModelParams;

/// Global L2 norm over all gradient blocks, accumulated in f64.
pub fn global_grad_norm<T: Real>(grads: &[(&'static str, Vec<T>)]) -> f64 {
    let mut sq = 0.0f64;
    for (_, g) in grads {
        for &v in g {
            let v = v.as_f64();
            sq += v * v;
        }
    }
    sq.sqrt()
}

/// If the global L2 norm exceeds `max_norm`, scale every gradient by
/// `max_norm / norm`. Returns the pre-clip norm. Non-finite gradients are an
/// error.
pub fn clip_gradients<T: Real>(
    grads: &mut [(&'static str, Vec<T>)],
    max_norm: f64,
) -> Result<f64> {
    for (name, g) in grads.iter() {
        if g.iter().any(|v| !v.is_finite()) {
            return Err(SggError::Diverged(format!(
                "non-finite gradient in block {name}"
            )));
        }
    }
    let norm = global_grad_norm(grads);
    if norm > max_norm {
        let scale = T::from_f64(max_norm / norm);
        for (_, g) in grads.iter_mut() {
            for v in g.iter_mut() {
                *v = *v * scale;
            }
        }
    }
    Ok(norm)
}

/// Adagrad: a += g^2; theta -= lr * g / sqrt(a), with `a` seeded at the
/// initial accumulator value.
pub struct Adagrad<T> {
    lr: T,
    accumulators: Vec<Vec<T>>,
}

impl<T: Real> Adagrad<T> {
    pub fn new(params: &ModelParams<T>, lr: f64, accum_init: f64) -> Self {
        let accumulators = params
            .blocks()
            .iter()
            .map(|(_, b)| vec![T::from_f64(accum_init); b.numel()])
            .collect();
        Adagrad {
            lr: T::from_f64(lr),
            accumulators,
        }
    }

    pub fn update(
        &mut self,
        params: &mut ModelParams<T>,
        grads: &[(&'static str, Vec<T>)],
    ) -> Result<()> {
        let mut blocks = params.blocks_mut();
        if blocks.len() != grads.len() {
            return Err(SggError::Data(format!(
                "{} gradient blocks for {} parameter blocks",
                grads.len(),
                blocks.len()
            )));
        }
        for (bi, ((name, block), (gname, g))) in
            blocks.iter_mut().zip(grads.iter()).enumerate()
        {
            if name != gname || block.numel() != g.len() {
                return Err(SggError::Data(format!(
                    "gradient block {gname} does not match parameter block {name}"
                )));
            }
            let acc = &mut self.accumulators[bi];
            for i in 0..g.len() {
                let gi = g[i];
                if gi == T::zero() {
                    continue;
                }
                acc[i] = acc[i] + gi * gi;
                block.data[i] = block.data[i] - self.lr * gi / acc[i].sqrt();
            }
        }
        Ok(())
    }

    pub fn accumulators(&self) -> &[Vec<T>] {
        &self.accumulators
    }
}
