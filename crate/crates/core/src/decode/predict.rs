use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use sgg_autodiff::Tape;

use crate::config::RunConfig;
use crate::data::{prepare_source, AssembleOptions, PreparedSource, RawRecord};
use crate::decode::beam::{beam_search, BeamParams, StepCandidates, StepModel};
use crate::decode::phrases::{extract_phrases, is_present, PresenceMode};
use crate::error::{Result, SggError};
use crate::model::{
    DecoderState, EncodedDoc, GeneratorSession, Guider, GuiderMode, ModelDims, ModelParams,
    TracedModel,
};
use crate::text::{TokenId, Vocabulary};

/// Ranked phrase lists for one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocPrediction {
    pub doc_id: usize,
    pub present: Vec<Vec<String>>,
    pub absent: Vec<Vec<String>>,
    /// Selector phrases dropped by the contiguity check.
    pub filtered_present: usize,
}

struct SelectorStepper<'m, 't, T: sgg_autodiff::Real> {
    tm: &'m TracedModel<'t, T>,
    enc: &'m EncodedDoc<'t, T>,
}

impl<'t, T: sgg_autodiff::Real> StepModel for SelectorStepper<'_, 't, T> {
    type State = DecoderState<'t, T>;

    fn start(&mut self) -> Result<Self::State> {
        Ok(self.tm.selector_init(self.enc))
    }

    fn advance(
        &mut self,
        state: &Self::State,
        prev: TokenId,
    ) -> Result<StepCandidates<Self::State>> {
        let (attn, next) = self.tm.selector_step(prev, state, self.enc)?;
        let alpha: Vec<f64> = attn.weights.data().iter().map(|v| v.as_f64()).collect();
        // marginalize positions into word candidates
        let candidates: Vec<(TokenId, f64)> = self
            .enc
            .word_positions
            .iter()
            .map(|(id, positions)| (*id, positions.iter().map(|&i| alpha[i]).sum()))
            .collect();
        Ok(StepCandidates {
            state: next,
            candidates,
            attention: alpha,
        })
    }
}

struct GeneratorStepper<'m, 't, T: sgg_autodiff::Real> {
    tm: &'m TracedModel<'t, T>,
    enc: &'m EncodedDoc<'t, T>,
    session: &'m GeneratorSession<'t, T>,
}

impl<'t, T: sgg_autodiff::Real> StepModel for GeneratorStepper<'_, 't, T> {
    type State = DecoderState<'t, T>;

    fn start(&mut self) -> Result<Self::State> {
        Ok(self.tm.generator_init(self.enc))
    }

    fn advance(
        &mut self,
        state: &Self::State,
        prev: TokenId,
    ) -> Result<StepCandidates<Self::State>> {
        let (mix, attn, next) = self.tm.generator_step(prev, state, self.enc, self.session)?;
        let alpha: Vec<f64> = attn.weights.data().iter().map(|v| v.as_f64()).collect();
        let final_dist = mix.final_dist.data();
        let candidates: Vec<(TokenId, f64)> = final_dist
            .iter()
            .enumerate()
            .filter(|(id, _)| *id != crate::text::PAD as usize && *id != crate::text::BOS as usize)
            .map(|(id, p)| (id as TokenId, p.as_f64()))
            .collect();
        Ok(StepCandidates {
            state: next,
            candidates,
            attention: alpha,
        })
    }
}

/// Shared read-only prediction context.
pub struct Predictor<'a> {
    pub params: &'a ModelParams<f32>,
    pub dims: ModelDims,
    pub mode: GuiderMode,
    pub vocab: &'a Vocabulary,
    pub beam: BeamParams,
    pub top_n: usize,
}

impl<'a> Predictor<'a> {
    pub fn from_config(
        cfg: &RunConfig,
        params: &'a ModelParams<f32>,
        dims: ModelDims,
        vocab: &'a Vocabulary,
    ) -> Self {
        Predictor {
            params,
            dims,
            mode: cfg.mode,
            vocab,
            beam: BeamParams {
                beam_width: cfg.beam_width,
                max_len: cfg.max_tgt_len,
                length_norm: cfg.length_norm,
            },
            top_n: cfg.top_n,
        }
    }

    fn assemble_opts(&self) -> AssembleOptions {
        AssembleOptions {
            max_src_len: self.dims.max_src_len,
            max_tgt_len: self.dims.max_tgt_len,
        }
    }
}

/// Merge ranked hypotheses into one phrase list: hypotheses in score order,
/// phrases in within-sequence order, global stem-level dedup, capped at
/// `top_n`.
fn merge_phrases(
    hyps: &[crate::decode::Hypothesis],
    vocab: &Vocabulary,
    ext_words: &[String],
    top_n: usize,
) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    let mut seen: Vec<Vec<String>> = Vec::new();
    for hyp in hyps {
        for phrase in extract_phrases(&hyp.tokens, vocab, ext_words) {
            if out.len() >= top_n {
                return out;
            }
            let stems = crate::text::stem_phrase(&phrase);
            if !seen.contains(&stems) {
                seen.push(stems);
                out.push(phrase);
            }
        }
    }
    out
}

/// Run selector beam, build the guider from the best selector hypothesis'
/// attention history, then run the generator beam with that guider.
pub fn predict_record(
    predictor: &Predictor<'_>,
    doc_id: usize,
    record: &RawRecord,
) -> Result<DocPrediction> {
    let prepared: PreparedSource =
        prepare_source(record, predictor.vocab, &predictor.assemble_opts());
    if prepared.tokens.is_empty() {
        return Ok(DocPrediction {
            doc_id,
            present: Vec::new(),
            absent: Vec::new(),
            filtered_present: 0,
        });
    }
    let tape: Tape<f32> = Tape::new();
    let tm = TracedModel::new(&tape, predictor.params, predictor.dims, predictor.mode)?;
    let enc = tm.encode(&prepared.ids, &prepared.ext_ids, prepared.ext_words.len())?;

    let mut sel = SelectorStepper { tm: &tm, enc: &enc };
    let sel_hyps = beam_search(&mut sel, &predictor.beam)?;

    // guider from the top selector hypothesis' attention history
    let guider = match (predictor.mode, sel_hyps.first()) {
        (GuiderMode::SgAblation, _) | (_, None) => None,
        (_, Some(top)) if top.attentions.is_empty() => None,
        (_, Some(top)) => {
            let l = enc.len();
            let mut r = vec![0.0f64; l];
            for alpha in &top.attentions {
                for (ri, ai) in r.iter_mut().zip(alpha) {
                    *ri += ai;
                }
            }
            let r_leaf = tape.vector(r.iter().map(|&v| v as f32).collect());
            Some(Guider {
                r: r_leaf,
                steps: top.attentions.len(),
            })
        }
    };
    let session = tm.generator_session(&enc, guider.as_ref())?;
    let mut gen = GeneratorStepper {
        tm: &tm,
        enc: &enc,
        session: &session,
    };
    let gen_hyps = beam_search(&mut gen, &predictor.beam)?;

    let present_raw = merge_phrases(
        &sel_hyps,
        predictor.vocab,
        &prepared.ext_words,
        predictor.top_n,
    );
    // pointer outputs are source words, but contiguity can still fail
    let mut filtered_present = 0usize;
    let present: Vec<Vec<String>> = present_raw
        .into_iter()
        .filter(|p| {
            let keep =
                is_present(p, &prepared.tokens, PresenceMode::Stemmed).unwrap_or(false);
            if !keep {
                filtered_present += 1;
            }
            keep
        })
        .collect();
    let absent = merge_phrases(
        &gen_hyps,
        predictor.vocab,
        &prepared.ext_words,
        predictor.top_n,
    );

    Ok(DocPrediction {
        doc_id,
        present,
        absent,
        filtered_present,
    })
}

/// Predict a corpus with a bounded worker pool; output order follows input
/// order regardless of worker scheduling.
pub fn predict_corpus(
    predictor: &Predictor<'_>,
    records: &[RawRecord],
    workers: usize,
) -> Result<Vec<DocPrediction>> {
    if workers <= 1 {
        return records
            .iter()
            .enumerate()
            .map(|(i, r)| predict_record(predictor, i, r))
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SggError::Decode(format!("worker pool: {e}")))?;
    pool.install(|| {
        use rayon::prelude::*;
        records
            .par_iter()
            .enumerate()
            .map(|(i, r)| predict_record(predictor, i, r))
            .collect()
    })
}

fn join_phrases(phrases: &[Vec<String>]) -> String {
    phrases
        .iter()
        .map(|p| p.join(" "))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_phrases(field: &str) -> Vec<Vec<String>> {
    field
        .split(';')
        .filter(|s| !s.is_empty())
        .map(|s| s.split_whitespace().map(|w| w.to_string()).collect())
        .collect()
}

/// One line per document: id, ranked present phrases, ranked absent phrases.
pub fn write_predictions(path: &Path, predictions: &[DocPrediction]) -> Result<()> {
    let mut out = String::new();
    for p in predictions {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            p.doc_id,
            join_phrases(&p.present),
            join_phrases(&p.absent)
        ));
    }
    let mut file = std::fs::File::create(path).map_err(|e| SggError::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| SggError::io(path, e))?;
    Ok(())
}

pub fn read_predictions(path: &Path) -> Result<Vec<DocPrediction>> {
    let file = std::fs::File::open(path).map_err(|e| SggError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| SggError::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.splitn(3, '\t');
        let doc_id: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| SggError::Record {
                line: i + 1,
                detail: "missing document id".into(),
            })?;
        let present = parse_phrases(fields.next().unwrap_or(""));
        let absent = parse_phrases(fields.next().unwrap_or(""));
        out.push(DocPrediction {
            doc_id,
            present,
            absent,
            filtered_present: 0,
        });
    }
    Ok(out)
}
