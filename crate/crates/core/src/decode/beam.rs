use crate::error::{Result, SggError};
use crate::text::{TokenId, BOS, EOS};

/// One beam hypothesis. The log probability is the sum of per-step log
/// probabilities (non-increasing as tokens are appended).
#[derive(Debug, Clone)]
pub struct Hypothesis {
    /// Emitted tokens (extended-vocabulary ids allowed).
    pub tokens: Vec<TokenId>,
    pub log_prob: f64,
    /// Per-step attention distributions (needed to build the guider from a
    /// selector hypothesis).
    pub attentions: Vec<Vec<f64>>,
    pub finished: bool,
    finish_step: usize,
}

/// Candidate continuations after consuming the previous token.
pub struct StepCandidates<S> {
    pub state: S,
    /// (token, probability) for every emittable token this step.
    pub candidates: Vec<(TokenId, f64)>,
    /// The attention distribution produced by this step.
    pub attention: Vec<f64>,
}

/// A decoder that can be advanced token by token.
pub trait StepModel {
    type State: Clone;

    fn start(&mut self) -> Result<Self::State>;

    /// Consume `prev` from `state` and return the next-step distribution.
    fn advance(&mut self, state: &Self::State, prev: TokenId) -> Result<StepCandidates<Self::State>>;
}

#[derive(Debug, Clone, Copy)]
pub struct BeamParams {
    pub beam_width: usize,
    pub max_len: usize,
    /// Rank finished hypotheses by log probability divided by length.
    pub length_norm: bool,
}

struct Live<S> {
    hyp: Hypothesis,
    state: S,
}

fn ranking_key(h: &Hypothesis, length_norm: bool) -> f64 {
    if length_norm {
        h.log_prob / h.tokens.len().max(1) as f64
    } else {
        h.log_prob
    }
}

/// Order: higher score first; ties broken by earlier finish, then by
/// lexicographically smaller token sequence.
fn compare(a: &Hypothesis, b: &Hypothesis, length_norm: bool) -> std::cmp::Ordering {
    ranking_key(b, length_norm)
        .partial_cmp(&ranking_key(a, length_norm))
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.finish_step.cmp(&b.finish_step))
        .then(a.tokens.cmp(&b.tokens))
}

/// Standard beam expansion from bos. Finished hypotheses (eos) are set
/// aside; the result is up to `beam_width` finished hypotheses ranked by
/// total log probability, padded with unfinished ones when fewer finish.
pub fn beam_search<M: StepModel>(model: &mut M, params: &BeamParams) -> Result<Vec<Hypothesis>> {
    if params.beam_width < 1 {
        return Err(SggError::Decode("beam_width must be at least 1".into()));
    }
    let width = params.beam_width;
    let mut live: Vec<Live<M::State>> = vec![Live {
        hyp: Hypothesis {
            tokens: Vec::new(),
            log_prob: 0.0,
            attentions: Vec::new(),
            finished: false,
            finish_step: usize::MAX,
        },
        state: model.start()?,
    }];
    let mut finished: Vec<Hypothesis> = Vec::new();

    for step in 0..params.max_len {
        if live.is_empty() {
            break;
        }
        let mut next: Vec<Live<M::State>> = Vec::new();
        for entry in &live {
            let prev = entry.hyp.tokens.last().copied().unwrap_or(BOS);
            let mut out = model.advance(&entry.state, prev)?;
            // keep the top extensions of this hypothesis
            out.candidates.sort_by(|a, b| {
                b.1.partial_cmp(&a.1)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.0.cmp(&b.0))
            });
            for &(tok, p) in out.candidates.iter().take(width) {
                let mut hyp = entry.hyp.clone();
                hyp.tokens.push(tok);
                hyp.log_prob += p.max(f64::MIN_POSITIVE).ln();
                hyp.attentions.push(out.attention.clone());
                if tok == EOS {
                    hyp.finished = true;
                    hyp.finish_step = step;
                    finished.push(hyp);
                } else {
                    next.push(Live {
                        hyp,
                        state: out.state.clone(),
                    });
                }
            }
        }
        next.sort_by(|a, b| compare(&a.hyp, &b.hyp, params.length_norm));
        next.truncate(width);
        live = next;
        finished.sort_by(|a, b| compare(a, b, params.length_norm));
        finished.truncate(width);
    }

    let mut result = finished;
    // pad with the best unfinished hypotheses when fewer than width finished
    let mut rest: Vec<Hypothesis> = live.into_iter().map(|l| l.hyp).collect();
    rest.sort_by(|a, b| compare(a, b, params.length_norm));
    for h in rest {
        if result.len() >= width {
            break;
        }
        result.push(h);
    }
    Ok(result)
}

/// Greedy decoding: follow the argmax token at every step.
pub fn greedy_decode<M: StepModel>(model: &mut M, max_len: usize) -> Result<Hypothesis> {
    let mut state = model.start()?;
    let mut hyp = Hypothesis {
        tokens: Vec::new(),
        log_prob: 0.0,
        attentions: Vec::new(),
        finished: false,
        finish_step: usize::MAX,
    };
    for step in 0..max_len {
        let prev = hyp.tokens.last().copied().unwrap_or(BOS);
        let out = model.advance(&state, prev)?;
        let best = out
            .candidates
            .iter()
            .copied()
            .max_by(|a, b| {
                a.1.partial_cmp(&b.1)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(b.0.cmp(&a.0))
            })
            .ok_or_else(|| SggError::Decode("no candidates".into()))?;
        hyp.tokens.push(best.0);
        hyp.log_prob += best.1.max(f64::MIN_POSITIVE).ln();
        hyp.attentions.push(out.attention.clone());
        if best.0 == EOS {
            hyp.finished = true;
            hyp.finish_step = step;
            break;
        }
        state = out.state;
    }
    Ok(hyp)
}

/// Recompute a hypothesis' score by replaying the model over its tokens.
pub fn replay_score<M: StepModel>(model: &mut M, tokens: &[TokenId]) -> Result<f64> {
    let mut state = model.start()?;
    let mut score = 0.0f64;
    let mut prev = BOS;
    for &tok in tokens {
        let out = model.advance(&state, prev)?;
        let p = out
            .candidates
            .iter()
            .find(|(t, _)| *t == tok)
            .map(|(_, p)| *p)
            .ok_or_else(|| SggError::Decode(format!("token {tok} not reachable")))?;
        score += p.max(f64::MIN_POSITIVE).ln();
        state = out.state;
        prev = tok;
    }
    Ok(score)
}
