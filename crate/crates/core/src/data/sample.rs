use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::data::RawRecord;
use crate::text::{tokenize, TokenId, Vocabulary, EOS, SEP};

/// True iff `needle` occurs as a contiguous subsequence of `hay`.
pub fn contiguous_subsequence<S: PartialEq>(needle: &[S], hay: &[S]) -> bool {
    if needle.is_empty() || needle.len() > hay.len() {
        return false;
    }
    hay.windows(needle.len()).any(|w| w == needle)
}

/// Partition tokenized keyphrases into present (contiguous subsequence of the
/// source) and absent, preserving the original order within each group.
pub fn split_keyphrases(
    source: &[String],
    keyphrases: &[Vec<String>],
) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
    let mut present = Vec::new();
    let mut absent = Vec::new();
    for kp in keyphrases {
        if contiguous_subsequence(kp, source) {
            present.push(kp.clone());
        } else {
            absent.push(kp.clone());
        }
    }
    (present, absent)
}

/// One assembled training example over a fixed vocabulary.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrainingSample {
    /// Source ids over the base vocabulary (OOV words are unk).
    pub source_ids: Vec<TokenId>,
    /// Source ids where OOV words carry temporary extended ids (>= V).
    pub source_ext_ids: Vec<TokenId>,
    /// Words behind the extended ids, in id order (id = V + index).
    pub ext_words: Vec<String>,
    /// Present keyphrases joined by sep, ending in eos; OOV present words use
    /// their extended id so decoding through vocab + ext table is exact.
    pub present_target: Vec<TokenId>,
    /// Absent keyphrases joined by sep, ending in eos, over the extended
    /// vocabulary (eos alone when no absent keyphrase exists).
    pub absent_target: Vec<TokenId>,
    /// For each present-target step, the source positions holding that word
    /// (empty for sep/eos).
    pub present_copy_positions: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy)]
pub struct AssembleOptions {
    pub max_src_len: usize,
    pub max_tgt_len: usize,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            max_src_len: 400,
            max_tgt_len: 25,
        }
    }
}

/// Why a record was rejected from the training set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    /// After truncation and splitting, no keyphrase is present in the source.
    NoPresentKeyphrase,
}

/// Tokenized, truncated source with base and extended id sequences.
#[derive(Debug, Clone)]
pub struct PreparedSource {
    pub tokens: Vec<String>,
    pub ids: Vec<TokenId>,
    pub ext_ids: Vec<TokenId>,
    pub ext_words: Vec<String>,
}

/// Tokenize title ++ abstract, truncate, and assign base/extended ids.
pub fn prepare_source(
    record: &RawRecord,
    vocab: &Vocabulary,
    opts: &AssembleOptions,
) -> PreparedSource {
    let mut tokens = tokenize(&record.title);
    tokens.extend(tokenize(&record.abstract_text));
    tokens.truncate(opts.max_src_len);

    let v = vocab.len() as TokenId;
    let mut ext_words: Vec<String> = Vec::new();
    let mut ext_index: HashMap<String, TokenId> = HashMap::new();
    let ids: Vec<TokenId> = tokens.iter().map(|w| vocab.id_or_unk(w)).collect();
    let mut ext_ids = Vec::with_capacity(tokens.len());
    for w in &tokens {
        let id = match vocab.id(w) {
            Some(id) => id,
            None => *ext_index.entry(w.clone()).or_insert_with(|| {
                ext_words.push(w.clone());
                v + (ext_words.len() as TokenId - 1)
            }),
        };
        ext_ids.push(id);
    }
    PreparedSource {
        tokens,
        ids,
        ext_ids,
        ext_words,
    }
}

/// Tokenize, truncate, split and encode one record. The present/absent split
/// runs on the truncated source so labels match what the model sees. Present
/// keyphrases are ordered by first occurrence in the source; absent ones keep
/// the author order.
pub fn assemble_sample(
    record: &RawRecord,
    vocab: &Vocabulary,
    opts: &AssembleOptions,
) -> std::result::Result<TrainingSample, RejectReason> {
    let prepared = prepare_source(record, vocab, opts);
    let source = &prepared.tokens;

    let keyphrases: Vec<Vec<String>> = record
        .keyphrases
        .iter()
        .map(|k| tokenize(k))
        .filter(|k| !k.is_empty())
        .collect();
    let (mut present, absent) = split_keyphrases(source, &keyphrases);
    if present.is_empty() {
        return Err(RejectReason::NoPresentKeyphrase);
    }
    present.sort_by_key(|kp| first_occurrence(kp, source));

    let v = vocab.len() as TokenId;
    let source_ids = prepared.ids;
    let source_ext_ids = prepared.ext_ids;
    let ext_words = prepared.ext_words;

    let ext_id = |w: &str| -> TokenId {
        vocab.id(w).unwrap_or_else(|| {
            ext_words
                .iter()
                .position(|e| e == w)
                .map(|i| v + i as TokenId)
                .unwrap_or(crate::text::UNK)
        })
    };

    let present_tokens = join_phrases(&present, opts.max_tgt_len);
    let absent_tokens = join_phrases(&absent, opts.max_tgt_len);

    let present_target: Vec<TokenId> = present_tokens
        .iter()
        .map(|t| match t {
            Joined::Sep => SEP,
            Joined::Eos => EOS,
            Joined::Word(w) => ext_id(w),
        })
        .collect();
    let absent_target: Vec<TokenId> = absent_tokens
        .iter()
        .map(|t| match t {
            Joined::Sep => SEP,
            Joined::Eos => EOS,
            Joined::Word(w) => ext_id(w),
        })
        .collect();

    let present_copy_positions: Vec<Vec<usize>> = present_tokens
        .iter()
        .map(|t| match t {
            Joined::Word(w) => source
                .iter()
                .enumerate()
                .filter(|(_, sw)| sw.as_str() == w.as_str())
                .map(|(i, _)| i)
                .collect(),
            _ => Vec::new(),
        })
        .collect();

    Ok(TrainingSample {
        source_ids,
        source_ext_ids,
        ext_words,
        present_target,
        absent_target,
        present_copy_positions,
    })
}

impl TrainingSample {
    /// Number of loss-bearing tokens across both target streams.
    pub fn token_count(&self) -> usize {
        self.present_target.len() + self.absent_target.len()
    }
}

fn first_occurrence(kp: &[String], source: &[String]) -> usize {
    if kp.is_empty() || kp.len() > source.len() {
        return usize::MAX;
    }
    source
        .windows(kp.len())
        .position(|w| w == kp)
        .unwrap_or(usize::MAX)
}

enum Joined<'a> {
    Word(&'a String),
    Sep,
    Eos,
}

/// p1 sep p2 ... sep pm eos, truncated to `max_len` tokens total (trailing
/// separators introduced by truncation are trimmed; eos is always last).
fn join_phrases(phrases: &[Vec<String>], max_len: usize) -> Vec<Joined<'_>> {
    let mut out: Vec<Joined<'_>> = Vec::new();
    for (i, p) in phrases.iter().enumerate() {
        if i > 0 {
            out.push(Joined::Sep);
        }
        for w in p {
            out.push(Joined::Word(w));
        }
    }
    out.truncate(max_len.saturating_sub(1));
    while matches!(out.last(), Some(Joined::Sep)) {
        out.pop();
    }
    out.push(Joined::Eos);
    out
}

/// Decode a target id sequence back to words through the vocabulary plus the
/// sample's extended table.
pub fn decode_ids(ids: &[TokenId], vocab: &Vocabulary, ext_words: &[String]) -> Vec<String> {
    ids.iter()
        .map(|&id| {
            if (id as usize) < vocab.len() {
                vocab.word(id).unwrap_or("<unk>").to_string()
            } else {
                ext_words
                    .get(id as usize - vocab.len())
                    .cloned()
                    .unwrap_or_else(|| "<unk>".to_string())
            }
        })
        .collect()
}
