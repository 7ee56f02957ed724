use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use sgg_autodiff::Real;

use crate::model::ModelDims;

/// One named trainable tensor; vectors have `cols == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBlock<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> ParamBlock<T> {
    fn new(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Self {
        // uniform [-0.2, 0.2], drawn in f64 so f32 and f64 models share the
        // same stream for a given seed
        let data = (0..rows * cols)
            .map(|_| T::from_f64(rng.gen_range(-0.2..=0.2)))
            .collect();
        ParamBlock { rows, cols, data }
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn is_vector(&self) -> bool {
        self.cols == 1
    }
}

/// All trainable weights. Field order is the canonical block order used by
/// initialization, the optimizer and the checkpoint format.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    /// Shared embedding matrix [V, E].
    pub embedding: ParamBlock<T>,

    // encoder, one LSTM per direction
    pub enc_fwd_w_ih: ParamBlock<T>, // [4H, E]
    pub enc_fwd_w_hh: ParamBlock<T>, // [4H, H]
    pub enc_fwd_b: ParamBlock<T>,    // [4H]
    pub enc_bwd_w_ih: ParamBlock<T>,
    pub enc_bwd_w_hh: ParamBlock<T>,
    pub enc_bwd_b: ParamBlock<T>,

    // bridges from final encoder states to decoder initial states
    pub sel_bridge_w: ParamBlock<T>, // [H, 2H]
    pub sel_bridge_b: ParamBlock<T>, // [H]
    pub gen_bridge_w: ParamBlock<T>,
    pub gen_bridge_b: ParamBlock<T>,

    // selector LSTM (input = embedding ++ previous context)
    pub sel_w_ih: ParamBlock<T>, // [4H, E + 2H]
    pub sel_w_hh: ParamBlock<T>, // [4H, H]
    pub sel_b: ParamBlock<T>,    // [4H]

    // selector attention: u_i = v^T tanh(W_s s + W_h h_i + b)
    pub sel_attn_ws: ParamBlock<T>, // [A, H]
    pub sel_attn_wh: ParamBlock<T>, // [2H, A] (stored transposed)
    pub sel_attn_b: ParamBlock<T>,  // [A]
    pub sel_attn_v: ParamBlock<T>,  // [A]

    // generator LSTM
    pub gen_w_ih: ParamBlock<T>,
    pub gen_w_hh: ParamBlock<T>,
    pub gen_b: ParamBlock<T>,

    // generator attention with guider input
    pub gen_attn_ws: ParamBlock<T>, // [A, H]
    pub gen_attn_wh: ParamBlock<T>, // [2H, A] (stored transposed)
    pub gen_attn_b: ParamBlock<T>,  // [A]
    pub gen_attn_v: ParamBlock<T>,  // [A]
    pub gen_attn_wr: ParamBlock<T>, // [A, K] guider expansion weights
    pub gen_attn_e: ParamBlock<T>,  // [K] learned 1 -> K expansion
    pub gen_attn_wc: ParamBlock<T>, // [A, 2H] context-projection variant

    // vocabulary head: P_vocab = softmax(W [s; c] + b)
    pub vocab_w: ParamBlock<T>, // [V, 3H]
    pub vocab_b: ParamBlock<T>, // [V]

    // soft switch: p_gen = sigmoid(W [c; s; emb] + b)
    pub pgen_w: ParamBlock<T>, // [1, 2H + H + E]
    pub pgen_b: ParamBlock<T>, // [1]
}

/// Initialize every weight and bias i.i.d. uniform on [-0.2, 0.2] from a
/// seeded generator.
pub fn init_params<T: Real>(dims: &ModelDims, seed: u64) -> ModelParams<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (v, e, h) = (dims.vocab, dims.embed, dims.hidden);
    let a = dims.attn();
    let k = dims.guider_k;
    let mut block = |rows: usize, cols: usize| ParamBlock::new(rows, cols, &mut rng);

    ModelParams {
        embedding: block(v, e),
        enc_fwd_w_ih: block(4 * h, e),
        enc_fwd_w_hh: block(4 * h, h),
        enc_fwd_b: block(4 * h, 1),
        enc_bwd_w_ih: block(4 * h, e),
        enc_bwd_w_hh: block(4 * h, h),
        enc_bwd_b: block(4 * h, 1),
        sel_bridge_w: block(h, 2 * h),
        sel_bridge_b: block(h, 1),
        gen_bridge_w: block(h, 2 * h),
        gen_bridge_b: block(h, 1),
        sel_w_ih: block(4 * h, e + 2 * h),
        sel_w_hh: block(4 * h, h),
        sel_b: block(4 * h, 1),
        sel_attn_ws: block(a, h),
        sel_attn_wh: block(2 * h, a),
        sel_attn_b: block(a, 1),
        sel_attn_v: block(a, 1),
        gen_w_ih: block(4 * h, e + 2 * h),
        gen_w_hh: block(4 * h, h),
        gen_b: block(4 * h, 1),
        gen_attn_ws: block(a, h),
        gen_attn_wh: block(2 * h, a),
        gen_attn_b: block(a, 1),
        gen_attn_v: block(a, 1),
        gen_attn_wr: block(a, k),
        gen_attn_e: block(k, 1),
        gen_attn_wc: block(a, 2 * h),
        vocab_w: block(v, 3 * h),
        vocab_b: block(v, 1),
        pgen_w: block(1, 2 * h + h + e),
        pgen_b: block(1, 1),
    }
}

macro_rules! for_each_block {
    ($self:expr, $f:expr) => {{
        $f("embedding", &$self.embedding);
        $f("enc_fwd_w_ih", &$self.enc_fwd_w_ih);
        $f("enc_fwd_w_hh", &$self.enc_fwd_w_hh);
        $f("enc_fwd_b", &$self.enc_fwd_b);
        $f("enc_bwd_w_ih", &$self.enc_bwd_w_ih);
        $f("enc_bwd_w_hh", &$self.enc_bwd_w_hh);
        $f("enc_bwd_b", &$self.enc_bwd_b);
        $f("sel_bridge_w", &$self.sel_bridge_w);
        $f("sel_bridge_b", &$self.sel_bridge_b);
        $f("gen_bridge_w", &$self.gen_bridge_w);
        $f("gen_bridge_b", &$self.gen_bridge_b);
        $f("sel_w_ih", &$self.sel_w_ih);
        $f("sel_w_hh", &$self.sel_w_hh);
        $f("sel_b", &$self.sel_b);
        $f("sel_attn_ws", &$self.sel_attn_ws);
        $f("sel_attn_wh", &$self.sel_attn_wh);
        $f("sel_attn_b", &$self.sel_attn_b);
        $f("sel_attn_v", &$self.sel_attn_v);
        $f("gen_w_ih", &$self.gen_w_ih);
        $f("gen_w_hh", &$self.gen_w_hh);
        $f("gen_b", &$self.gen_b);
        $f("gen_attn_ws", &$self.gen_attn_ws);
        $f("gen_attn_wh", &$self.gen_attn_wh);
        $f("gen_attn_b", &$self.gen_attn_b);
        $f("gen_attn_v", &$self.gen_attn_v);
        $f("gen_attn_wr", &$self.gen_attn_wr);
        $f("gen_attn_e", &$self.gen_attn_e);
        $f("gen_attn_wc", &$self.gen_attn_wc);
        $f("vocab_w", &$self.vocab_w);
        $f("vocab_b", &$self.vocab_b);
        $f("pgen_w", &$self.pgen_w);
        $f("pgen_b", &$self.pgen_b);
    }};
}

impl<T: Real> ModelParams<T> {
    /// Blocks in canonical order.
    pub fn blocks(&self) -> Vec<(&'static str, &ParamBlock<T>)> {
        let mut out = Vec::with_capacity(32);
        for_each_block!(self, |name, block| out.push((name, block)));
        out
    }

    /// Mutable blocks in canonical order.
    pub fn blocks_mut(&mut self) -> Vec<(&'static str, &mut ParamBlock<T>)> {
        vec![
            ("embedding", &mut self.embedding),
            ("enc_fwd_w_ih", &mut self.enc_fwd_w_ih),
            ("enc_fwd_w_hh", &mut self.enc_fwd_w_hh),
            ("enc_fwd_b", &mut self.enc_fwd_b),
            ("enc_bwd_w_ih", &mut self.enc_bwd_w_ih),
            ("enc_bwd_w_hh", &mut self.enc_bwd_w_hh),
            ("enc_bwd_b", &mut self.enc_bwd_b),
            ("sel_bridge_w", &mut self.sel_bridge_w),
            ("sel_bridge_b", &mut self.sel_bridge_b),
            ("gen_bridge_w", &mut self.gen_bridge_w),
            ("gen_bridge_b", &mut self.gen_bridge_b),
            ("sel_w_ih", &mut self.sel_w_ih),
            ("sel_w_hh", &mut self.sel_w_hh),
            ("sel_b", &mut self.sel_b),
            ("sel_attn_ws", &mut self.sel_attn_ws),
            ("sel_attn_wh", &mut self.sel_attn_wh),
            ("sel_attn_b", &mut self.sel_attn_b),
            ("sel_attn_v", &mut self.sel_attn_v),
            ("gen_w_ih", &mut self.gen_w_ih),
            ("gen_w_hh", &mut self.gen_w_hh),
            ("gen_b", &mut self.gen_b),
            ("gen_attn_ws", &mut self.gen_attn_ws),
            ("gen_attn_wh", &mut self.gen_attn_wh),
            ("gen_attn_b", &mut self.gen_attn_b),
            ("gen_attn_v", &mut self.gen_attn_v),
            ("gen_attn_wr", &mut self.gen_attn_wr),
            ("gen_attn_e", &mut self.gen_attn_e),
            ("gen_attn_wc", &mut self.gen_attn_wc),
            ("vocab_w", &mut self.vocab_w),
            ("vocab_b", &mut self.vocab_b),
            ("pgen_w", &mut self.pgen_w),
            ("pgen_b", &mut self.pgen_b),
        ]
    }

    pub fn param_count(&self) -> usize {
        self.blocks().iter().map(|(_, b)| b.numel()).sum()
    }

    /// Convert precision (used to run verification passes in f64).
    pub fn cast<U: Real>(&self) -> ModelParams<U> {
        let conv = |b: &ParamBlock<T>| ParamBlock {
            rows: b.rows,
            cols: b.cols,
            data: b.data.iter().map(|&x| U::from_f64(x.as_f64())).collect(),
        };
        ModelParams {
            embedding: conv(&self.embedding),
            enc_fwd_w_ih: conv(&self.enc_fwd_w_ih),
            enc_fwd_w_hh: conv(&self.enc_fwd_w_hh),
            enc_fwd_b: conv(&self.enc_fwd_b),
            enc_bwd_w_ih: conv(&self.enc_bwd_w_ih),
            enc_bwd_w_hh: conv(&self.enc_bwd_w_hh),
            enc_bwd_b: conv(&self.enc_bwd_b),
            sel_bridge_w: conv(&self.sel_bridge_w),
            sel_bridge_b: conv(&self.sel_bridge_b),
            gen_bridge_w: conv(&self.gen_bridge_w),
            gen_bridge_b: conv(&self.gen_bridge_b),
            sel_w_ih: conv(&self.sel_w_ih),
            sel_w_hh: conv(&self.sel_w_hh),
            sel_b: conv(&self.sel_b),
            sel_attn_ws: conv(&self.sel_attn_ws),
            sel_attn_wh: conv(&self.sel_attn_wh),
            sel_attn_b: conv(&self.sel_attn_b),
            sel_attn_v: conv(&self.sel_attn_v),
            gen_w_ih: conv(&self.gen_w_ih),
            gen_w_hh: conv(&self.gen_w_hh),
            gen_b: conv(&self.gen_b),
            gen_attn_ws: conv(&self.gen_attn_ws),
            gen_attn_wh: conv(&self.gen_attn_wh),
            gen_attn_b: conv(&self.gen_attn_b),
            gen_attn_v: conv(&self.gen_attn_v),
            gen_attn_wr: conv(&self.gen_attn_wr),
            gen_attn_e: conv(&self.gen_attn_e),
            gen_attn_wc: conv(&self.gen_attn_wc),
            vocab_w: conv(&self.vocab_w),
            vocab_b: conv(&self.vocab_b),
            pgen_w: conv(&self.pgen_w),
            pgen_b: conv(&self.pgen_b),
        }
    }
}
