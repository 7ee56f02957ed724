//! The traced network against an independent scalar re-evaluation of the
//! same equations, plus the constructed-case examples.

mod support;

use sgg_autodiff::Tape;
use sgg_core::data::TrainingSample;
use sgg_core::model::{init_params, lstm_cell, GuiderMode, ModelParams, TracedModel};
use sgg_core::text::{EOS, SEP, UNK};
use support::{toy_dims, toy_samples, RefModel};

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn traced<'t>(
    tape: &'t Tape<f64>,
    params: &ModelParams<f64>,
    vocab: usize,
    mode: GuiderMode,
) -> TracedModel<'t, f64> {
    TracedModel::new(tape, params, toy_dims(vocab), mode).unwrap()
}

// ---- lstm_cell --------------------------------------------------------

#[test]
fn lstm_zero_everything_gives_zero_state() {
    let tape: Tape<f64> = Tape::new();
    let h = 3;
    let w_ih = tape.matrix(vec![0.0; 4 * h * 2], 4 * h, 2).unwrap();
    let w_hh = tape.matrix(vec![0.0; 4 * h * h], 4 * h, h).unwrap();
    let b = tape.vector(vec![0.0; 4 * h]);
    let x = tape.vector(vec![0.0; 2]);
    let (hn, cn) = lstm_cell(x, tape.zeros(h), tape.zeros(h), w_ih, w_hh, b, h).unwrap();
    assert_eq!(hn.data(), vec![0.0; h]);
    assert_eq!(cn.data(), vec![0.0; h]);
}

#[test]
fn lstm_saturated_forget_gate_preserves_cell() {
    // forget-gate bias 50 approximates the +inf limit; with all weights zero
    // the input gate contributes sigmoid(0)*tanh(0) = 0, so c stays c_prev.
    let tape: Tape<f64> = Tape::new();
    let h = 3;
    let mut bias = vec![0.0; 4 * h];
    for j in 0..h {
        bias[h + j] = 50.0;
    }
    let w_ih = tape.matrix(vec![0.0; 4 * h * 2], 4 * h, 2).unwrap();
    let w_hh = tape.matrix(vec![0.0; 4 * h * h], 4 * h, h).unwrap();
    let b = tape.vector(bias);
    let x = tape.vector(vec![0.3, -0.8]);
    let c0 = tape.vector(vec![0.4, -1.2, 0.9]);
    let (_, cn) = lstm_cell(x, tape.zeros(h), c0, w_ih, w_hh, b, h).unwrap();
    assert!(max_abs_diff(&cn.data(), &c0.data()) < 1e-9);
}

#[test]
fn lstm_matches_scalar_gate_oracle() {
    let dims = toy_dims(20);
    let params: ModelParams<f64> = init_params(&dims, 5);
    let tape: Tape<f64> = Tape::new();
    let w_ih = tape
        .matrix(
            params.enc_fwd_w_ih.data.clone(),
            params.enc_fwd_w_ih.rows,
            params.enc_fwd_w_ih.cols,
        )
        .unwrap();
    let w_hh = tape
        .matrix(
            params.enc_fwd_w_hh.data.clone(),
            params.enc_fwd_w_hh.rows,
            params.enc_fwd_w_hh.cols,
        )
        .unwrap();
    let b = tape.vector(params.enc_fwd_b.data.clone());
    let x_data = vec![0.3, -0.4, 0.9, 0.1];
    let h_data = vec![0.2, -0.1, 0.5, -0.8, 0.05];
    let c_data = vec![-0.3, 0.6, 0.0, 1.1, -0.7];
    let x = tape.vector(x_data.clone());
    let h0 = tape.vector(h_data.clone());
    let c0 = tape.vector(c_data.clone());
    let (hn, cn) = lstm_cell(x, h0, c0, w_ih, w_hh, b, dims.hidden).unwrap();

    let (h_ref, c_ref) = support::lstm_ref(
        &x_data,
        &h_data,
        &c_data,
        &params.enc_fwd_w_ih,
        &params.enc_fwd_w_hh,
        &params.enc_fwd_b,
        dims.hidden,
    );
    assert!(max_abs_diff(&hn.data(), &h_ref) < 1e-6);
    assert!(max_abs_diff(&cn.data(), &c_ref) < 1e-6);
}

// ---- encoder ----------------------------------------------------------

#[test]
fn encoder_zero_params_gives_zero_states() {
    let dims = toy_dims(20);
    let mut params: ModelParams<f64> = init_params(&dims, 1);
    for (_, b) in params.blocks_mut() {
        b.data.iter_mut().for_each(|v| *v = 0.0);
    }
    let tape = Tape::new();
    let tm = traced(&tape, &params, 20, GuiderMode::Sgg);
    let enc = tm.encode(&[5, 6, 7], &[5, 6, 7], 0).unwrap();
    for i in 0..enc.len() {
        assert_eq!(enc.hidden(i).unwrap().data(), vec![0.0; 2 * dims.hidden]);
    }
}

#[test]
fn encoder_output_dimensionality() {
    let params: ModelParams<f64> = init_params(&toy_dims(20), 2);
    let tape = Tape::new();
    let tm = traced(&tape, &params, 20, GuiderMode::Sgg);
    let enc = tm.encode(&[5, 6, 7, 8], &[5, 6, 7, 8], 0).unwrap();
    assert_eq!(enc.len(), 6); // 4 text positions + sep + eos sentinels
    for i in 0..enc.len() {
        assert_eq!(enc.hidden(i).unwrap().numel(), 2 * toy_dims(20).hidden);
    }
}

#[test]
fn encoder_matches_step_by_step_oracle() {
    let dims = toy_dims(20);
    let params: ModelParams<f64> = init_params(&dims, 3);
    let tape = Tape::new();
    let tm = traced(&tape, &params, 20, GuiderMode::Sgg);
    let ids = [5u32, 9, 14, 6];
    let enc = tm.encode(&ids, &ids, 0).unwrap();

    let rm = RefModel {
        p: &params,
        dims,
        mode: GuiderMode::Sgg,
    };
    let r = rm.encode(&ids, &ids);
    assert_eq!(enc.len(), r.states.len());
    for i in 0..enc.len() {
        assert!(
            max_abs_diff(&enc.hidden(i).unwrap().data(), &r.states[i]) < 1e-5,
            "position {i}"
        );
    }
}

#[test]
fn encoder_rejects_empty_source() {
    let params: ModelParams<f64> = init_params(&toy_dims(20), 2);
    let tape = Tape::new();
    let tm = traced(&tape, &params, 20, GuiderMode::Sgg);
    assert!(tm.encode(&[], &[], 0).is_err());
}

// ---- selector ---------------------------------------------------------

#[test]
fn selector_uniform_attention_when_states_identical() {
    // zero parameters make every encoder state identical, so the matching
    // score is constant and the softmax is uniform
    let dims = toy_dims(20);
    let mut params: ModelParams<f64> = init_params(&dims, 1);
    for (_, b) in params.blocks_mut() {
        b.data.iter_mut().for_each(|v| *v = 0.0);
    }
    let tape = Tape::new();
    let tm = traced(&tape, &params, 20, GuiderMode::Sgg);
    let enc = tm.encode(&[5, 6, 7, 8], &[5, 6, 7, 8], 0).unwrap();
    let st = tm.selector_init(&enc);
    let (attn, _) = tm.selector_step(2, &st, &enc).unwrap();
    let alpha = attn.weights.data();
    let uniform = 1.0 / enc.len() as f64;
    for a in alpha {
        assert!((a - uniform).abs() < 1e-12);
    }
}

#[test]
fn selector_singleton_source_gets_full_mass() {
    // encoder length is text + 2 sentinels, so a singleton distribution
    // needs a single-position comparison: check the L=1 softmax property on
    // the scores var directly instead through a 1-token source
    let params: ModelParams<f64> = init_params(&toy_dims(20), 4);
    let tape = Tape::new();
    let tm = traced(&tape, &params, 20, GuiderMode::Sgg);
    let enc = tm.encode(&[7], &[7], 0).unwrap();
    let st = tm.selector_init(&enc);
    let (attn, _) = tm.selector_step(2, &st, &enc).unwrap();
    let alpha = attn.weights.data();
    assert_eq!(alpha.len(), 3);
    let sum: f64 = alpha.iter().sum();
    assert!((sum - 1.0).abs() < 1e-9);
}

#[test]
fn selector_matches_scalar_oracle() {
    let dims = toy_dims(20);
    let params: ModelParams<f64> = init_params(&dims, 6);
    let tape = Tape::new();
    let tm = traced(&tape, &params, 20, GuiderMode::Sgg);
    let ids = [11u32, 5, 9];
    let enc = tm.encode(&ids, &ids, 0).unwrap();
    let rm = RefModel {
        p: &params,
        dims,
        mode: GuiderMode::Sgg,
    };
    let renc = rm.encode(&ids, &ids);

    let mut st = tm.selector_init(&enc);
    let mut rst = rm.dec_init(&renc.sel_s0);
    let mut prev = sgg_core::text::BOS;
    for &gold in &[5u32, SEP, 9, EOS] {
        let (attn, next) = tm.selector_step(prev, &st, &enc).unwrap();
        let (r_alpha, r_next) = rm.selector_step(prev, &rst, &renc);
        assert!(max_abs_diff(&attn.weights.data(), &r_alpha) < 1e-6);
        st = next;
        rst = r_next;
        prev = gold;
    }
}

// ---- guider -----------------------------------------------------------

#[test]
fn guider_accumulates_componentwise() {
    let params: ModelParams<f64> = init_params(&toy_dims(20), 7);
    let tape = Tape::new();
    let tm = traced(&tape, &params, 20, GuiderMode::Sgg);
    let enc = tm.encode(&[5, 6], &[5, 6], 0).unwrap();
    let mut st = tm.selector_init(&enc);
    let mut attns = Vec::new();
    for prev in [2u32, 5] {
        let (attn, next) = tm.selector_step(prev, &st, &enc).unwrap();
        attns.push(attn);
        st = next;
    }
    let g = tm.build_guider(&attns).unwrap();
    let expect: Vec<f64> = attns[0]
        .weights
        .data()
        .iter()
        .zip(attns[1].weights.data())
        .map(|(a, b)| a + b)
        .collect();
    assert!(max_abs_diff(&g.r.data(), &expect) < 1e-12);
    assert_eq!(g.steps, 2);
    // single attention: identity
    let g1 = tm.build_guider(&attns[..1]).unwrap();
    assert_eq!(g1.r.data(), attns[0].weights.data());
    // sum(r) = step count
    let total: f64 = g.r.data().iter().sum();
    assert!((total - 2.0).abs() < 1e-4);
    assert!(tm.build_guider(&[]).is_err());
}

// ---- generator --------------------------------------------------------

struct GenStepOut {
    final_dist: Vec<f64>,
    copy: Vec<f64>,
    p_gen: f64,
    ext_size: usize,
    vocab: usize,
}

fn run_one_generator_step(params: &ModelParams<f64>, mode: GuiderMode) -> GenStepOut {
    let dims = toy_dims(20);
    let tape = Tape::new();
    let tm = traced(&tape, params, 20, mode);
    let ids = [5u32, 6, 7];
    let ext = [5u32, 20, 7]; // position 1 holds an OOV word with extended id 20
    let enc = tm.encode(&ids, &ext, 1).unwrap();
    let mut st = tm.selector_init(&enc);
    let mut attns = Vec::new();
    for prev in [2u32, 5] {
        let (attn, next) = tm.selector_step(prev, &st, &enc).unwrap();
        attns.push(attn);
        st = next;
    }
    let guider = tm.build_guider(&attns).unwrap();
    let session = tm.generator_session(&enc, Some(&guider)).unwrap();
    let gst = tm.generator_init(&enc);
    let (mix, _, _) = tm.generator_step(2, &gst, &enc, &session).unwrap();
    GenStepOut {
        final_dist: mix.final_dist.data(),
        copy: mix.copy.data(),
        p_gen: mix.p_gen.value(),
        ext_size: enc.ext_size,
        vocab: dims.vocab,
    }
}

#[test]
fn generator_saturated_pgen_uses_vocabulary_only() {
    let dims = toy_dims(20);
    let mut params: ModelParams<f64> = init_params(&dims, 8);
    params.pgen_b.data[0] = 50.0; // saturate the switch toward generation
    let out = run_one_generator_step(&params, GuiderMode::Sgg);
    assert!(out.p_gen > 1.0 - 1e-9);
    // zero mass on extended ids
    for id in out.vocab..out.ext_size {
        assert!(out.final_dist[id] < 1e-9, "extended id {id} has mass");
    }
}

#[test]
fn generator_zero_pgen_copies_only() {
    let dims = toy_dims(20);
    let mut params: ModelParams<f64> = init_params(&dims, 8);
    params.pgen_b.data[0] = -50.0;
    let out = run_one_generator_step(&params, GuiderMode::Sgg);
    assert!(out.p_gen < 1e-20);
    // the copy term carries exactly zero mass off the source; with the
    // switch saturated toward copying the residual generation mass on any
    // non-source word is bounded by p_gen
    let source_ids = [5usize, 7, 20, SEP as usize, EOS as usize];
    for (id, (&p, &c)) in out.final_dist.iter().zip(&out.copy).enumerate() {
        if source_ids.contains(&id) {
            continue;
        }
        assert!(c == 0.0, "non-source id {id} has copy mass {c}");
        assert!(p <= out.p_gen, "non-source id {id} has mass {p}");
    }
}

#[test]
fn generator_matches_scalar_oracle_in_every_mode() {
    for mode in [
        GuiderMode::Sgg,
        GuiderMode::SgAblation,
        GuiderMode::GuiderVariant,
    ] {
        let dims = toy_dims(20);
        let params: ModelParams<f64> = init_params(&dims, 9);
        let tape = Tape::new();
        let tm = traced(&tape, &params, 20, mode);
        let ids = [5u32, 6, 7, 8];
        let ext = [5u32, 20, 7, 8];
        let enc = tm.encode(&ids, &ext, 1).unwrap();

        let rm = RefModel {
            p: &params,
            dims,
            mode,
        };
        let renc = rm.encode(&ids, &ext);

        // teacher-forced selector for the guider
        let mut st = tm.selector_init(&enc);
        let mut rst = rm.dec_init(&renc.sel_s0);
        let mut attns = Vec::new();
        let mut r = vec![0.0f64; enc.len()];
        let mut prev = 2u32;
        for &gold in &[5u32, 8, EOS] {
            let (attn, next) = tm.selector_step(prev, &st, &enc).unwrap();
            let (ra, rnext) = rm.selector_step(prev, &rst, &renc);
            for (rv, av) in r.iter_mut().zip(&ra) {
                *rv += av;
            }
            attns.push(attn);
            st = next;
            rst = rnext;
            prev = gold;
        }
        let guider = tm.build_guider(&attns).unwrap();
        let session = tm.generator_session(&enc, Some(&guider)).unwrap();

        let mut gst = tm.generator_init(&enc);
        let mut rgst = rm.dec_init(&renc.gen_s0);
        let mut prev = 2u32;
        for &gold in &[9u32, 20, EOS] {
            let (mix, _, next) = tm.generator_step(prev, &gst, &enc, &session).unwrap();
            let (r_final, r_pgen, _, rnext) =
                rm.generator_step(prev, &rgst, &renc, &r, enc.ext_size);
            assert!(
                max_abs_diff(&mix.final_dist.data(), &r_final) < 1e-6,
                "{mode:?}"
            );
            assert!((mix.p_gen.value() - r_pgen).abs() < 1e-9, "{mode:?}");
            let sum: f64 = mix.final_dist.data().iter().sum();
            assert!((sum - 1.0).abs() < 1e-6, "{mode:?} sums to {sum}");
            gst = next;
            rgst = rnext;
            prev = gold;
        }
    }
}

// ---- joint loss -------------------------------------------------------

#[test]
fn loss_matches_scalar_reference_on_toy_samples() {
    for mode in [
        GuiderMode::Sgg,
        GuiderMode::SgAblation,
        GuiderMode::GuiderVariant,
    ] {
        let dims = toy_dims(20);
        let params: ModelParams<f64> = init_params(&dims, 10);
        let samples = toy_samples(20);
        let rm = RefModel {
            p: &params,
            dims,
            mode,
        };
        for sample in &samples {
            let tape = Tape::new();
            let tm = traced(&tape, &params, 20, mode);
            let loss = tm.compute_loss(sample).unwrap();
            let (rp, ra, rt) = rm.loss(sample);
            assert!((loss.l_present.value() - rp).abs() < 1e-6, "{mode:?}");
            assert!((loss.l_absent.value() - ra).abs() < 1e-6, "{mode:?}");
            assert!((loss.total.value() - rt).abs() < 1e-6, "{mode:?}");
            // total = l_present + l_absent exactly (same-addition route)
            assert_eq!(
                loss.total.value(),
                loss.l_present.value() + loss.l_absent.value()
            );
        }
    }
}

#[test]
fn loss_on_uniform_distribution_is_closed_form() {
    // -log of a gathered uniform distribution over E entries is ln E per
    // step; verified through the same clamped-log gather the loss uses
    let tape: Tape<f64> = Tape::new();
    let e = 27usize;
    let n = 4usize;
    let uniform = tape.vector(vec![1.0 / e as f64; e]);
    let mut total = tape.scalar(0.0);
    for _ in 0..n {
        total = total.add(uniform.nll_gather(&[3]).unwrap()).unwrap();
    }
    assert!((total.value() - n as f64 * (e as f64).ln()).abs() < 1e-9);
}

#[test]
fn loss_zero_when_gold_has_probability_one() {
    let tape: Tape<f64> = Tape::new();
    let onehot = tape.vector(vec![0.0, 1.0, 0.0]);
    let loss = onehot.nll_gather(&[1]).unwrap();
    assert_eq!(loss.value(), 0.0);
}

#[test]
fn pad_masking_leaves_loss_unchanged() {
    let dims = toy_dims(20);
    let params: ModelParams<f64> = init_params(&dims, 11);
    let samples = toy_samples(20);
    let tape = Tape::new();
    let tm = traced(&tape, &params, 20, GuiderMode::Sgg);
    let base = tm.compute_loss(&samples[0]).unwrap();

    let mut padded: TrainingSample = samples[0].clone();
    padded.present_target.extend([0u32; 3]);
    padded
        .present_copy_positions
        .extend([vec![], vec![], vec![]]);
    padded.absent_target.extend([0u32; 2]);
    let tape2 = Tape::new();
    let tm2 = traced(&tape2, &params, 20, GuiderMode::Sgg);
    let with_pads = tm2.compute_loss(&padded).unwrap();
    assert_eq!(base.total.value(), with_pads.total.value());
    assert_eq!(base.present_tokens, with_pads.present_tokens);
}

// ---- gradient connectivity through the guider --------------------------

#[test]
fn guider_path_connects_selector_to_generator_loss() {
    let dims = toy_dims(20);
    let params: ModelParams<f64> = init_params(&dims, 12);
    let sample = &toy_samples(20)[0];

    let grad_norm_of = |mode: GuiderMode| -> f64 {
        let tape = Tape::new();
        let tm = traced(&tape, &params, 20, mode);
        let loss = tm.compute_loss(sample).unwrap();
        tape.backward(loss.l_absent).unwrap();
        let grads = tm.block_grads();
        let mut sq = 0.0;
        for (name, g) in &grads {
            if name.starts_with("sel_attn") || name.starts_with("sel_w") {
                for v in g {
                    sq += v * v;
                }
            }
        }
        sq.sqrt()
    };

    assert!(grad_norm_of(GuiderMode::Sgg) > 1e-8);
    assert_eq!(grad_norm_of(GuiderMode::SgAblation), 0.0);
}

#[test]
fn unk_embedding_used_for_extended_prev_token() {
    // feeding an extended id as the previous token must behave exactly like
    // feeding unk
    let dims = toy_dims(20);
    let params: ModelParams<f64> = init_params(&dims, 13);
    let tape = Tape::new();
    let tm = traced(&tape, &params, 20, GuiderMode::Sgg);
    let enc = tm.encode(&[5, 6, 7], &[5, 20, 7], 1).unwrap();
    let st = tm.selector_init(&enc);
    let (a1, _) = tm.selector_step(20, &st, &enc).unwrap();
    let (a2, _) = tm.selector_step(UNK, &st, &enc).unwrap();
    assert_eq!(a1.weights.data(), a2.weights.data());
}
