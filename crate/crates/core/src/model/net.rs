use sgg_autodiff::{Real, Tape, Var};

use crate::data::TrainingSample;
use crate::error::{Result, SggError};
use crate::model::{GuiderMode, ModelDims, ModelParams};
use crate::text::{TokenId, BOS, EOS, PAD, SEP, UNK};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Selector,
    Generator,
}

/// Decoder recurrent state: LSTM hidden/cell plus the previous attention
/// context (fed back into the next LSTM input).
#[derive(Clone, Copy)]
pub struct DecoderState<'t, T: Real> {
    pub stage: Stage,
    pub h: Var<'t, T>,
    pub cell: Var<'t, T>,
    pub context: Var<'t, T>,
}

/// Unnormalized scores and their softmax over encoder positions.
#[derive(Clone, Copy)]
pub struct AttentionResult<'t, T: Real> {
    pub scores: Var<'t, T>,
    pub weights: Var<'t, T>,
}

/// Static accumulation of the selector's attention distributions.
#[derive(Clone, Copy)]
pub struct Guider<'t, T: Real> {
    pub r: Var<'t, T>,
    pub steps: usize,
}

/// The generator's output distribution family for one step.
#[derive(Clone, Copy)]
pub struct MixtureDistribution<'t, T: Real> {
    /// Soft switch in (0,1).
    pub p_gen: Var<'t, T>,
    /// Distribution over the base vocabulary.
    pub p_vocab: Var<'t, T>,
    /// Copy distribution over the extended vocabulary (scattered attention).
    pub copy: Var<'t, T>,
    /// p_gen * p_vocab + (1 - p_gen) * copy, over the extended vocabulary.
    pub final_dist: Var<'t, T>,
}

/// Per-document encoder output plus decoding-invariant projections.
pub struct EncodedDoc<'t, T: Real> {
    /// Encoder input ids over the base vocabulary: source plus the two
    /// pointable sentinels (sep, eos) appended at the end.
    pub enc_ids: Vec<TokenId>,
    /// Same positions over the extended vocabulary.
    pub enc_ext_ids: Vec<TokenId>,
    /// Number of source text positions (sentinels excluded).
    pub text_len: usize,
    /// Extended vocabulary size for this document (V + distinct OOV words).
    pub ext_size: usize,
    /// Encoder states stacked as rows: [L, 2H].
    pub h_mat: Var<'t, T>,
    sel_pre: Var<'t, T>,
    gen_pre: Var<'t, T>,
    sel_s0: Var<'t, T>,
    gen_s0: Var<'t, T>,
    /// 0/1 scatter matrix [ext_size, L] mapping positions to extended ids.
    scatter: Var<'t, T>,
    /// Distinct extended ids in the source with their positions, id-ordered.
    pub word_positions: Vec<(TokenId, Vec<usize>)>,
}

impl<'t, T: Real> EncodedDoc<'t, T> {
    /// Encoder length L (text length plus the two sentinels).
    pub fn len(&self) -> usize {
        self.enc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.enc_ids.is_empty()
    }

    /// Hidden vector of position `i` (concatenated directions, dimension 2H).
    pub fn hidden(&self, i: usize) -> Result<Var<'t, T>> {
        Ok(self.h_mat.row(i)?)
    }
}

/// Guider-dependent precomputations for a generator decoding session.
pub struct GeneratorSession<'t, T: Real> {
    /// [L, A]: encoder projection plus (mode-dependent) guider rows.
    base: Var<'t, T>,
    /// Extra per-step column term (context-projection variant).
    col_extra: Option<Var<'t, T>>,
}

/// Totals of the teacher-forced joint loss.
pub struct LossBreakdown<'t, T: Real> {
    pub l_present: Var<'t, T>,
    pub l_absent: Var<'t, T>,
    pub total: Var<'t, T>,
    pub present_tokens: usize,
    pub absent_tokens: usize,
    /// Selector attention results in step order (guider inputs).
    pub selector_attentions: Vec<AttentionResult<'t, T>>,
}

impl<T: Real> LossBreakdown<'_, T> {
    pub fn token_count(&self) -> usize {
        self.present_tokens + self.absent_tokens
    }

    pub fn per_token(&self) -> f64 {
        self.total.value().as_f64() / self.token_count().max(1) as f64
    }
}

struct LstmVars<'t, T: Real> {
    w_ih: Var<'t, T>,
    w_hh: Var<'t, T>,
    b: Var<'t, T>,
}

/// Standard LSTM cell: i,f,o = sigmoid(affine), g = tanh(affine),
/// c = f*c_prev + i*g, h = o*tanh(c). Gate order in the stacked affine
/// output is i, f, g, o.
pub fn lstm_cell<'t, T: Real>(
    x: Var<'t, T>,
    h_prev: Var<'t, T>,
    c_prev: Var<'t, T>,
    w_ih: Var<'t, T>,
    w_hh: Var<'t, T>,
    b: Var<'t, T>,
    hidden: usize,
) -> Result<(Var<'t, T>, Var<'t, T>)> {
    let gates = w_ih
        .matmul(x)?
        .add(w_hh.matmul(h_prev)?)?
        .add(b)?;
    if gates.numel() != 4 * hidden {
        return Err(SggError::Data(format!(
            "lstm gate vector has {} entries, expected {}",
            gates.numel(),
            4 * hidden
        )));
    }
    let i = gates.slice(0, hidden)?.sigmoid();
    let f = gates.slice(hidden, hidden)?.sigmoid();
    let g = gates.slice(2 * hidden, hidden)?.tanh();
    let o = gates.slice(3 * hidden, hidden)?.sigmoid();
    let c = f.mul(c_prev)?.add(i.mul(g)?)?;
    let h = o.mul(c.tanh())?;
    Ok((h, c))
}

/// Model parameters registered as leaves on a tape, ready for forward and
/// backward passes. One instance serves one tape.
pub struct TracedModel<'t, T: Real> {
    pub tape: &'t Tape<T>,
    pub dims: ModelDims,
    pub mode: GuiderMode,
    // canonical-order vars (aligned with ModelParams::blocks) for gradients
    ordered: Vec<(&'static str, Var<'t, T>)>,
    embedding: Var<'t, T>,
    enc_fwd: LstmVars<'t, T>,
    enc_bwd: LstmVars<'t, T>,
    sel_bridge_w: Var<'t, T>,
    sel_bridge_b: Var<'t, T>,
    gen_bridge_w: Var<'t, T>,
    gen_bridge_b: Var<'t, T>,
    sel_lstm: LstmVars<'t, T>,
    sel_attn_ws: Var<'t, T>,
    sel_attn_wh: Var<'t, T>,
    sel_attn_b: Var<'t, T>,
    sel_attn_v: Var<'t, T>,
    gen_lstm: LstmVars<'t, T>,
    gen_attn_ws: Var<'t, T>,
    gen_attn_wh: Var<'t, T>,
    gen_attn_b: Var<'t, T>,
    gen_attn_v: Var<'t, T>,
    gen_attn_wr: Var<'t, T>,
    gen_attn_e: Var<'t, T>,
    gen_attn_wc: Var<'t, T>,
    vocab_w: Var<'t, T>,
    vocab_b: Var<'t, T>,
    pgen_w: Var<'t, T>,
    pgen_b: Var<'t, T>,
}

impl<'t, T: Real> TracedModel<'t, T> {
    pub fn new(
        tape: &'t Tape<T>,
        params: &ModelParams<T>,
        dims: ModelDims,
        mode: GuiderMode,
    ) -> Result<Self> {
        let mut ordered = Vec::with_capacity(32);
        for (name, b) in params.blocks() {
            let var = if b.is_vector() {
                tape.vector(b.data.clone())
            } else {
                tape.matrix(b.data.clone(), b.rows, b.cols)?
            };
            ordered.push((name, var));
        }
        let get = |name: &str| -> Var<'t, T> {
            ordered
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, v)| *v)
                .expect("known block name")
        };
        Ok(TracedModel {
            tape,
            dims,
            mode,
            embedding: get("embedding"),
            enc_fwd: LstmVars {
                w_ih: get("enc_fwd_w_ih"),
                w_hh: get("enc_fwd_w_hh"),
                b: get("enc_fwd_b"),
            },
            enc_bwd: LstmVars {
                w_ih: get("enc_bwd_w_ih"),
                w_hh: get("enc_bwd_w_hh"),
                b: get("enc_bwd_b"),
            },
            sel_bridge_w: get("sel_bridge_w"),
            sel_bridge_b: get("sel_bridge_b"),
            gen_bridge_w: get("gen_bridge_w"),
            gen_bridge_b: get("gen_bridge_b"),
            sel_lstm: LstmVars {
                w_ih: get("sel_w_ih"),
                w_hh: get("sel_w_hh"),
                b: get("sel_b"),
            },
            sel_attn_ws: get("sel_attn_ws"),
            sel_attn_wh: get("sel_attn_wh"),
            sel_attn_b: get("sel_attn_b"),
            sel_attn_v: get("sel_attn_v"),
            gen_lstm: LstmVars {
                w_ih: get("gen_w_ih"),
                w_hh: get("gen_w_hh"),
                b: get("gen_b"),
            },
            gen_attn_ws: get("gen_attn_ws"),
            gen_attn_wh: get("gen_attn_wh"),
            gen_attn_b: get("gen_attn_b"),
            gen_attn_v: get("gen_attn_v"),
            gen_attn_wr: get("gen_attn_wr"),
            gen_attn_e: get("gen_attn_e"),
            gen_attn_wc: get("gen_attn_wc"),
            vocab_w: get("vocab_w"),
            vocab_b: get("vocab_b"),
            pgen_w: get("pgen_w"),
            pgen_b: get("pgen_b"),
            ordered,
        })
    }

    /// Gradients per block in canonical order (zeros for unreached blocks).
    pub fn block_grads(&self) -> Vec<(&'static str, Vec<T>)> {
        self.ordered
            .iter()
            .map(|(name, var)| (*name, var.grad()))
            .collect()
    }

    fn embed_id(&self, id: TokenId) -> TokenId {
        if (id as usize) < self.dims.vocab {
            id
        } else {
            UNK
        }
    }

    fn embed(&self, id: TokenId) -> Result<Var<'t, T>> {
        Ok(self.embedding.row(self.embed_id(id) as usize)?)
    }

    /// Run the bi-LSTM encoder over the source plus pointable sep/eos
    /// sentinels and precompute the decoding-invariant projections.
    pub fn encode(
        &self,
        source_ids: &[TokenId],
        source_ext_ids: &[TokenId],
        n_ext_words: usize,
    ) -> Result<EncodedDoc<'t, T>> {
        if source_ids.is_empty() {
            return Err(SggError::Data("cannot encode an empty source".into()));
        }
        if source_ids.len() != source_ext_ids.len() {
            return Err(SggError::Data(
                "source id sequences have mismatched lengths".into(),
            ));
        }
        let text_len = source_ids.len();
        let mut enc_ids = source_ids.to_vec();
        enc_ids.extend([SEP, EOS]);
        let mut enc_ext_ids = source_ext_ids.to_vec();
        enc_ext_ids.extend([SEP, EOS]);
        let l = enc_ids.len();
        let h = self.dims.hidden;
        let tape = self.tape;

        let embs: Vec<Var<'t, T>> = enc_ids
            .iter()
            .map(|&id| self.embed(id))
            .collect::<Result<_>>()?;

        let mut fwd = Vec::with_capacity(l);
        let mut state = (tape.zeros(h), tape.zeros(h));
        for &emb in &embs {
            let (hn, cn) = lstm_cell(
                emb,
                state.0,
                state.1,
                self.enc_fwd.w_ih,
                self.enc_fwd.w_hh,
                self.enc_fwd.b,
                h,
            )?;
            fwd.push(hn);
            state = (hn, cn);
        }
        let fwd_last = *fwd.last().expect("non-empty");

        let mut bwd = vec![None; l];
        let mut state = (tape.zeros(h), tape.zeros(h));
        for i in (0..l).rev() {
            let (hn, cn) = lstm_cell(
                embs[i],
                state.0,
                state.1,
                self.enc_bwd.w_ih,
                self.enc_bwd.w_hh,
                self.enc_bwd.b,
                h,
            )?;
            bwd[i] = Some(hn);
            state = (hn, cn);
        }
        let bwd_first = bwd[0].expect("filled");

        let rows: Vec<Var<'t, T>> = fwd
            .iter()
            .zip(&bwd)
            .map(|(f, b)| tape.concat(&[*f, b.expect("filled")]))
            .collect::<std::result::Result<_, _>>()?;
        let h_mat = tape.concat_rows(&rows, 2 * h)?;

        let sel_pre = h_mat.matmul(self.sel_attn_wh)?;
        let gen_pre = h_mat.matmul(self.gen_attn_wh)?;

        let bridge_in = tape.concat(&[fwd_last, bwd_first])?;
        let sel_s0 = self
            .sel_bridge_w
            .matmul(bridge_in)?
            .add(self.sel_bridge_b)?
            .tanh();
        let gen_s0 = self
            .gen_bridge_w
            .matmul(bridge_in)?
            .add(self.gen_bridge_b)?
            .tanh();

        let ext_size = self.dims.vocab + n_ext_words;
        let mut scatter_data = vec![T::zero(); ext_size * l];
        for (i, &id) in enc_ext_ids.iter().enumerate() {
            scatter_data[id as usize * l + i] = T::one();
        }
        let scatter = tape.matrix(scatter_data, ext_size, l)?;

        let mut word_positions: Vec<(TokenId, Vec<usize>)> = Vec::new();
        for (i, &id) in enc_ext_ids.iter().enumerate() {
            match word_positions.binary_search_by_key(&id, |(w, _)| *w) {
                Ok(slot) => word_positions[slot].1.push(i),
                Err(slot) => word_positions.insert(slot, (id, vec![i])),
            }
        }

        Ok(EncodedDoc {
            enc_ids,
            enc_ext_ids,
            text_len,
            ext_size,
            h_mat,
            sel_pre,
            gen_pre,
            sel_s0,
            gen_s0,
            scatter,
            word_positions,
        })
    }

    pub fn selector_init(&self, enc: &EncodedDoc<'t, T>) -> DecoderState<'t, T> {
        DecoderState {
            stage: Stage::Selector,
            h: enc.sel_s0,
            cell: self.tape.zeros(self.dims.hidden),
            context: self.tape.zeros(2 * self.dims.hidden),
        }
    }

    pub fn generator_init(&self, enc: &EncodedDoc<'t, T>) -> DecoderState<'t, T> {
        DecoderState {
            stage: Stage::Generator,
            h: enc.gen_s0,
            cell: self.tape.zeros(self.dims.hidden),
            context: self.tape.zeros(2 * self.dims.hidden),
        }
    }

    /// One pointing step: update the LSTM on the previous word and produce
    /// the attention distribution over encoder positions, which *is* the
    /// selector's output distribution.
    pub fn selector_step(
        &self,
        prev: TokenId,
        state: &DecoderState<'t, T>,
        enc: &EncodedDoc<'t, T>,
    ) -> Result<(AttentionResult<'t, T>, DecoderState<'t, T>)> {
        if state.stage != Stage::Selector {
            return Err(SggError::Decode("selector_step on generator state".into()));
        }
        let emb = self.embed(prev)?;
        let x = self.tape.concat(&[emb, state.context])?;
        let (h, cell) = lstm_cell(
            x,
            state.h,
            state.cell,
            self.sel_lstm.w_ih,
            self.sel_lstm.w_hh,
            self.sel_lstm.b,
            self.dims.hidden,
        )?;
        let col = self.sel_attn_ws.matmul(h)?.add(self.sel_attn_b)?;
        let scores = enc
            .sel_pre
            .add_row_broadcast(col)?
            .tanh()
            .matmul(self.sel_attn_v)?;
        let weights = scores.softmax()?;
        let context = weights.matmul(enc.h_mat)?;
        Ok((
            AttentionResult { scores, weights },
            DecoderState {
                stage: Stage::Selector,
                h,
                cell,
                context,
            },
        ))
    }

    /// Sum the selector's attention distributions into the static guider.
    pub fn build_guider(
        &self,
        attentions: &[AttentionResult<'t, T>],
    ) -> Result<Guider<'t, T>> {
        let first = attentions
            .first()
            .ok_or_else(|| SggError::Data("guider needs at least one attention".into()))?;
        let mut r = first.weights;
        for a in &attentions[1..] {
            r = r.add(a.weights)?;
        }
        Ok(Guider {
            r,
            steps: attentions.len(),
        })
    }

    /// Prepare the generator's attention base for one document. The guider
    /// enters per the configured mode; `sg-ablation` ignores it entirely.
    pub fn generator_session(
        &self,
        enc: &EncodedDoc<'t, T>,
        guider: Option<&Guider<'t, T>>,
    ) -> Result<GeneratorSession<'t, T>> {
        let l = enc.len();
        if let Some(g) = guider {
            if g.r.numel() != l {
                return Err(SggError::Decode(format!(
                    "guider length {} does not match encoder length {l}",
                    g.r.numel()
                )));
            }
        }
        match self.mode {
            GuiderMode::SgAblation => Ok(GeneratorSession {
                base: enc.gen_pre,
                col_extra: None,
            }),
            GuiderMode::Sgg => {
                let g = guider
                    .ok_or_else(|| SggError::Decode("sgg mode requires a guider".into()))?;
                // per-position scalar injection: row i gains r_i * (W_r e)
                let we = self.gen_attn_wr.matmul(self.gen_attn_e)?;
                let rows = g
                    .r
                    .reshaped(l, 1)?
                    .matmul(we.reshaped(1, self.dims.attn())?)?;
                Ok(GeneratorSession {
                    base: enc.gen_pre.add(rows)?,
                    col_extra: None,
                })
            }
            GuiderMode::GuiderVariant => {
                let g = guider
                    .ok_or_else(|| SggError::Decode("guider-variant requires a guider".into()))?;
                let rctx = g.r.matmul(enc.h_mat)?;
                let col = self.gen_attn_wc.matmul(rctx)?;
                Ok(GeneratorSession {
                    base: enc.gen_pre,
                    col_extra: Some(col),
                })
            }
        }
    }

    /// One pointer-generator step producing the mixture distribution over
    /// the extended vocabulary.
    pub fn generator_step(
        &self,
        prev: TokenId,
        state: &DecoderState<'t, T>,
        enc: &EncodedDoc<'t, T>,
        session: &GeneratorSession<'t, T>,
    ) -> Result<(
        MixtureDistribution<'t, T>,
        AttentionResult<'t, T>,
        DecoderState<'t, T>,
    )> {
        if state.stage != Stage::Generator {
            return Err(SggError::Decode("generator_step on selector state".into()));
        }
        let emb = self.embed(prev)?;
        let x = self.tape.concat(&[emb, state.context])?;
        let (h, cell) = lstm_cell(
            x,
            state.h,
            state.cell,
            self.gen_lstm.w_ih,
            self.gen_lstm.w_hh,
            self.gen_lstm.b,
            self.dims.hidden,
        )?;
        let mut col = self.gen_attn_ws.matmul(h)?.add(self.gen_attn_b)?;
        if let Some(extra) = session.col_extra {
            col = col.add(extra)?;
        }
        let scores = session
            .base
            .add_row_broadcast(col)?
            .tanh()
            .matmul(self.gen_attn_v)?;
        let weights = scores.softmax()?;
        let context = weights.matmul(enc.h_mat)?;

        let p_vocab = self
            .vocab_w
            .matmul(self.tape.concat(&[h, context])?)?
            .add(self.vocab_b)?
            .softmax()?;
        let p_gen = self
            .pgen_w
            .matmul(self.tape.concat(&[context, h, emb])?)?
            .add(self.pgen_b)?
            .sigmoid();

        let copy = enc.scatter.matmul(weights)?;
        let p_vocab_ext = if enc.ext_size > self.dims.vocab {
            let zeros = self.tape.zeros(enc.ext_size - self.dims.vocab);
            self.tape.concat(&[p_vocab, zeros])?
        } else {
            p_vocab
        };
        let final_dist = p_gen
            .mul(p_vocab_ext)?
            .add(p_gen.one_minus()?.mul(copy)?)?;

        Ok((
            MixtureDistribution {
                p_gen,
                p_vocab,
                copy,
                final_dist,
            },
            AttentionResult { scores, weights },
            DecoderState {
                stage: Stage::Generator,
                h,
                cell,
                context,
            },
        ))
    }

    /// Pointer targets for one present-target step: recorded source
    /// positions for words, the appended sentinel positions for sep/eos.
    fn pointer_targets(sample: &TrainingSample, step: usize, gold: TokenId) -> Vec<usize> {
        let text_len = sample.source_ids.len();
        match gold {
            SEP => vec![text_len],
            EOS => vec![text_len + 1],
            _ => sample
                .present_copy_positions
                .get(step)
                .cloned()
                .unwrap_or_default(),
        }
    }

    /// Teacher-forced joint loss over both target streams. Trailing pad
    /// tokens in either target are masked out entirely.
    pub fn compute_loss(&self, sample: &TrainingSample) -> Result<LossBreakdown<'t, T>> {
        let enc = self.encode(
            &sample.source_ids,
            &sample.source_ext_ids,
            sample.ext_words.len(),
        )?;

        // selector over the present stream
        let mut state = self.selector_init(&enc);
        let mut prev = BOS;
        let mut attentions = Vec::new();
        let mut l_present: Option<Var<'t, T>> = None;
        let mut present_tokens = 0;
        for (t, &gold) in sample.present_target.iter().enumerate() {
            if gold == PAD {
                break;
            }
            let (attn, next) = self.selector_step(prev, &state, &enc)?;
            let positions = Self::pointer_targets(sample, t, gold);
            let step_loss = attn.weights.nll_gather(&positions)?;
            l_present = Some(match l_present {
                Some(acc) => acc.add(step_loss)?,
                None => step_loss,
            });
            attentions.push(attn);
            present_tokens += 1;
            state = next;
            prev = gold;
        }
        let l_present = l_present
            .ok_or_else(|| SggError::Data("present target stream is empty".into()))?;

        let guider = self.build_guider(&attentions)?;
        let session = self.generator_session(&enc, Some(&guider))?;

        // generator over the absent stream
        let mut state = self.generator_init(&enc);
        let mut prev = BOS;
        let mut l_absent: Option<Var<'t, T>> = None;
        let mut absent_tokens = 0;
        for &gold in &sample.absent_target {
            if gold == PAD {
                break;
            }
            let (mix, _, next) = self.generator_step(prev, &state, &enc, &session)?;
            let step_loss = mix.final_dist.nll_gather(&[gold as usize])?;
            l_absent = Some(match l_absent {
                Some(acc) => acc.add(step_loss)?,
                None => step_loss,
            });
            absent_tokens += 1;
            state = next;
            prev = gold;
        }
        let l_absent = l_absent
            .ok_or_else(|| SggError::Data("absent target stream is empty".into()))?;

        let total = l_present.add(l_absent)?;
        if !total.value().is_finite() {
            return Err(SggError::Diverged(format!(
                "non-finite loss {}",
                total.value()
            )));
        }
        Ok(LossBreakdown {
            l_present,
            l_absent,
            total,
            present_tokens,
            absent_tokens,
            selector_attentions: attentions,
        })
    }
}
