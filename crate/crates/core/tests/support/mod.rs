//! Test support: an independent scalar re-evaluation of the network used as
//! an oracle against the traced implementation, plus shared fixtures.
//!
//! Everything here is plain f64 loops over the parameter blocks — no tape,
//! no shared code with the implementation under test.

pub mod porter_pairs;

use sgg_core::data::TrainingSample;
use sgg_core::model::{GuiderMode, ModelDims, ModelParams, ParamBlock};
use sgg_core::text::{TokenId, BOS, EOS, SEP, UNK};

pub const LOG_CLAMP: f64 = 1e-12;

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn matvec(w: &ParamBlock<f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(w.cols, x.len(), "matvec shape");
    let mut out = vec![0.0; w.rows];
    for r in 0..w.rows {
        for c in 0..w.cols {
            out[r] += w.data[r * w.cols + c] * x[c];
        }
    }
    out
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn softmax(x: &[f64]) -> Vec<f64> {
    let max = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = x.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

/// Standard LSTM cell with gate order i, f, g, o.
pub fn lstm_ref(
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    w_ih: &ParamBlock<f64>,
    w_hh: &ParamBlock<f64>,
    b: &ParamBlock<f64>,
    hidden: usize,
) -> (Vec<f64>, Vec<f64>) {
    let gates = add(&add(&matvec(w_ih, x), &matvec(w_hh, h_prev)), &b.data);
    let mut h = vec![0.0; hidden];
    let mut c = vec![0.0; hidden];
    for j in 0..hidden {
        let i_g = sigmoid(gates[j]);
        let f_g = sigmoid(gates[hidden + j]);
        let g_g = gates[2 * hidden + j].tanh();
        let o_g = sigmoid(gates[3 * hidden + j]);
        c[j] = f_g * c_prev[j] + i_g * g_g;
        h[j] = o_g * c[j].tanh();
    }
    (h, c)
}

pub struct RefModel<'a> {
    pub p: &'a ModelParams<f64>,
    pub dims: ModelDims,
    pub mode: GuiderMode,
}

pub struct RefEncoding {
    pub enc_ids: Vec<TokenId>,
    pub enc_ext_ids: Vec<TokenId>,
    pub states: Vec<Vec<f64>>, // h_i, 2H each
    pub sel_s0: Vec<f64>,
    pub gen_s0: Vec<f64>,
}

#[derive(Clone)]
pub struct RefDecState {
    pub h: Vec<f64>,
    pub cell: Vec<f64>,
    pub context: Vec<f64>,
}

impl<'a> RefModel<'a> {
    fn embed(&self, id: TokenId) -> Vec<f64> {
        let id = if (id as usize) < self.dims.vocab { id } else { UNK };
        let e = self.dims.embed;
        self.p.embedding.data[id as usize * e..(id as usize + 1) * e].to_vec()
    }

    pub fn encode(&self, source_ids: &[TokenId], source_ext_ids: &[TokenId]) -> RefEncoding {
        let mut enc_ids = source_ids.to_vec();
        enc_ids.extend([SEP, EOS]);
        let mut enc_ext_ids = source_ext_ids.to_vec();
        enc_ext_ids.extend([SEP, EOS]);
        let h = self.dims.hidden;
        let l = enc_ids.len();

        let mut fwd = Vec::with_capacity(l);
        let (mut hh, mut cc) = (vec![0.0; h], vec![0.0; h]);
        for &id in &enc_ids {
            let (nh, nc) = lstm_ref(
                &self.embed(id),
                &hh,
                &cc,
                &self.p.enc_fwd_w_ih,
                &self.p.enc_fwd_w_hh,
                &self.p.enc_fwd_b,
                h,
            );
            fwd.push(nh.clone());
            hh = nh;
            cc = nc;
        }
        let mut bwd = vec![Vec::new(); l];
        let (mut hh, mut cc) = (vec![0.0; h], vec![0.0; h]);
        for i in (0..l).rev() {
            let (nh, nc) = lstm_ref(
                &self.embed(enc_ids[i]),
                &hh,
                &cc,
                &self.p.enc_bwd_w_ih,
                &self.p.enc_bwd_w_hh,
                &self.p.enc_bwd_b,
                h,
            );
            bwd[i] = nh.clone();
            hh = nh;
            cc = nc;
        }
        let states: Vec<Vec<f64>> = fwd
            .iter()
            .zip(&bwd)
            .map(|(f, b)| {
                let mut v = f.clone();
                v.extend_from_slice(b);
                v
            })
            .collect();
        let mut bridge_in = fwd[l - 1].clone();
        bridge_in.extend_from_slice(&bwd[0]);
        let sel_s0: Vec<f64> = add(&matvec(&self.p.sel_bridge_w, &bridge_in), &self.p.sel_bridge_b.data)
            .iter()
            .map(|v| v.tanh())
            .collect();
        let gen_s0: Vec<f64> = add(&matvec(&self.p.gen_bridge_w, &bridge_in), &self.p.gen_bridge_b.data)
            .iter()
            .map(|v| v.tanh())
            .collect();
        RefEncoding {
            enc_ids,
            enc_ext_ids,
            states,
            sel_s0,
            gen_s0,
        }
    }

    pub fn dec_init(&self, s0: &[f64]) -> RefDecState {
        RefDecState {
            h: s0.to_vec(),
            cell: vec![0.0; self.dims.hidden],
            context: vec![0.0; 2 * self.dims.hidden],
        }
    }

    /// score_i = v . tanh(Ws s + Wh^T h_i + b [+ guider term])
    fn attention(
        &self,
        s: &[f64],
        enc: &RefEncoding,
        ws: &ParamBlock<f64>,
        wh: &ParamBlock<f64>,
        b: &ParamBlock<f64>,
        v: &ParamBlock<f64>,
        guider_term: Option<&dyn Fn(usize, usize) -> f64>,
    ) -> (Vec<f64>, Vec<f64>) {
        let a_dim = self.dims.attn();
        let col = add(&matvec(ws, s), &b.data);
        let mut scores = Vec::with_capacity(enc.states.len());
        for (i, h_i) in enc.states.iter().enumerate() {
            let mut pre = col.clone();
            for (d, hv) in h_i.iter().enumerate() {
                for a in 0..a_dim {
                    pre[a] += wh.data[d * a_dim + a] * hv;
                }
            }
            if let Some(g) = guider_term {
                for (a, p) in pre.iter_mut().enumerate() {
                    *p += g(i, a);
                }
            }
            let mut u = 0.0;
            for a in 0..a_dim {
                u += v.data[a] * pre[a].tanh();
            }
            scores.push(u);
        }
        let alpha = softmax(&scores);
        (scores, alpha)
    }

    fn context(&self, alpha: &[f64], enc: &RefEncoding) -> Vec<f64> {
        let mut c = vec![0.0; 2 * self.dims.hidden];
        for (a, h_i) in alpha.iter().zip(&enc.states) {
            for (cv, hv) in c.iter_mut().zip(h_i) {
                *cv += a * hv;
            }
        }
        c
    }

    /// One selector step; returns (alpha, next state).
    pub fn selector_step(
        &self,
        prev: TokenId,
        st: &RefDecState,
        enc: &RefEncoding,
    ) -> (Vec<f64>, RefDecState) {
        let mut x = self.embed(prev);
        x.extend_from_slice(&st.context);
        let (h, cell) = lstm_ref(
            &x,
            &st.h,
            &st.cell,
            &self.p.sel_w_ih,
            &self.p.sel_w_hh,
            &self.p.sel_b,
            self.dims.hidden,
        );
        let (_, alpha) = self.attention(
            &h,
            enc,
            &self.p.sel_attn_ws,
            &self.p.sel_attn_wh,
            &self.p.sel_attn_b,
            &self.p.sel_attn_v,
            None,
        );
        let context = self.context(&alpha, enc);
        (alpha, RefDecState { h, cell, context })
    }

    /// One generator step; returns (final distribution over E, p_gen, alpha,
    /// next state).
    pub fn generator_step(
        &self,
        prev: TokenId,
        st: &RefDecState,
        enc: &RefEncoding,
        guider_r: &[f64],
        ext_size: usize,
    ) -> (Vec<f64>, f64, Vec<f64>, RefDecState) {
        let emb = self.embed(prev);
        let mut x = emb.clone();
        x.extend_from_slice(&st.context);
        let (h, cell) = lstm_ref(
            &x,
            &st.h,
            &st.cell,
            &self.p.gen_w_ih,
            &self.p.gen_w_hh,
            &self.p.gen_b,
            self.dims.hidden,
        );

        let a_dim = self.dims.attn();
        let k = self.dims.guider_k;
        // per-position scalar injection: row i gains r_i * (W_r e)
        let mut we = vec![0.0; a_dim];
        for a in 0..a_dim {
            for kk in 0..k {
                we[a] += self.p.gen_attn_wr.data[a * k + kk] * self.p.gen_attn_e.data[kk];
            }
        }
        // context-projection variant: every position gains W_c (H^T r)
        let mut wc_col = vec![0.0; a_dim];
        if self.mode == GuiderMode::GuiderVariant {
            let mut rctx = vec![0.0; 2 * self.dims.hidden];
            for (ri, h_i) in guider_r.iter().zip(&enc.states) {
                for (cv, hv) in rctx.iter_mut().zip(h_i) {
                    *cv += ri * hv;
                }
            }
            wc_col = matvec(&self.p.gen_attn_wc, &rctx);
        }
        let mode = self.mode;
        let guider_term = move |i: usize, a: usize| -> f64 {
            match mode {
                GuiderMode::Sgg => guider_r[i] * we[a],
                GuiderMode::SgAblation => 0.0,
                GuiderMode::GuiderVariant => wc_col[a],
            }
        };
        let (_, alpha) = self.attention(
            &h,
            enc,
            &self.p.gen_attn_ws,
            &self.p.gen_attn_wh,
            &self.p.gen_attn_b,
            &self.p.gen_attn_v,
            Some(&guider_term),
        );
        let context = self.context(&alpha, enc);

        let mut sc = h.clone();
        sc.extend_from_slice(&context);
        let p_vocab = softmax(&add(&matvec(&self.p.vocab_w, &sc), &self.p.vocab_b.data));

        let mut cse = context.clone();
        cse.extend_from_slice(&h);
        cse.extend_from_slice(&emb);
        let p_gen = sigmoid(matvec(&self.p.pgen_w, &cse)[0] + self.p.pgen_b.data[0]);

        let mut final_dist = vec![0.0; ext_size];
        for (w, pv) in p_vocab.iter().enumerate() {
            final_dist[w] = p_gen * pv;
        }
        for (i, &id) in enc.enc_ext_ids.iter().enumerate() {
            final_dist[id as usize] += (1.0 - p_gen) * alpha[i];
        }
        (final_dist, p_gen, alpha, RefDecState { h, cell, context })
    }

    /// Eq. 13-15 teacher-forced joint loss.
    pub fn loss(&self, sample: &TrainingSample) -> (f64, f64, f64) {
        let enc = self.encode(&sample.source_ids, &sample.source_ext_ids);
        let text_len = sample.source_ids.len();
        let ext_size = self.dims.vocab + sample.ext_words.len();

        let mut st = self.dec_init(&enc.sel_s0);
        let mut prev = BOS;
        let mut l_present = 0.0;
        let mut r = vec![0.0; enc.enc_ids.len()];
        for (t, &gold) in sample.present_target.iter().enumerate() {
            let (alpha, next) = self.selector_step(prev, &st, &enc);
            let positions: Vec<usize> = match gold {
                SEP => vec![text_len],
                EOS => vec![text_len + 1],
                _ => sample.present_copy_positions[t].clone(),
            };
            let p: f64 = positions.iter().map(|&i| alpha[i]).sum();
            l_present += -(p.max(LOG_CLAMP)).ln();
            for (rv, av) in r.iter_mut().zip(&alpha) {
                *rv += av;
            }
            st = next;
            prev = gold;
        }

        let mut st = self.dec_init(&enc.gen_s0);
        let mut prev = BOS;
        let mut l_absent = 0.0;
        for &gold in &sample.absent_target {
            let (final_dist, _, _, next) = self.generator_step(prev, &st, &enc, &r, ext_size);
            let p = final_dist[gold as usize];
            l_absent += -(p.max(LOG_CLAMP)).ln();
            st = next;
            prev = gold;
        }
        (l_present, l_absent, l_present + l_absent)
    }
}

/// Toy dimensions used by the oracle and gradient tests.
pub fn toy_dims(vocab: usize) -> ModelDims {
    ModelDims {
        vocab,
        embed: 4,
        hidden: 5,
        guider_k: 3,
        max_src_len: 400,
        max_tgt_len: 25,
    }
}

/// Hand-assembled toy samples over a vocabulary of the given size.
/// Source text length 6 with one OOV word (unk in base ids, extended id in
/// ext ids); targets exercise words, separators and eos.
pub fn toy_samples(vocab: usize) -> Vec<TrainingSample> {
    let v = vocab as TokenId;
    let w = |i: u32| 5 + i; // first non-reserved ids
    vec![
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
    ]
}
