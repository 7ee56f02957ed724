//! Seeded synthetic corpus for desk-scale verification.
//!
//! Both profiles guarantee that every generated present keyphrase is a
//! contiguous subsequence of the source and every absent keyphrase is not.
//!
//! * [`SynthProfile::Synonym`]: present keyphrases are contiguous source
//!   spans; absent keyphrases are other spans with every word mapped through
//!   a fixed synonym table (synonym words never occur in any source).
//! * [`SynthProfile::Ablation`]: each document carries three two-word topics
//!   drawn at random; two are placed adjacently and labeled present, the
//!   remaining one is placed with fillers between its words and labeled
//!   absent verbatim. Which topics are selected is random, so only the
//!   selector's output (via the guider) reveals it — the signal the guider
//!   ablation comparison needs.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::data::RawRecord;
use crate::text::stem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthProfile {
    Synonym,
    Ablation,
}

#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub seed: u64,
    pub size: usize,
    pub profile: SynthProfile,
}

/// Deterministic pool of stem-stable pseudo-words.
fn word_pool() -> Vec<String> {
    const ONSETS: [&str; 12] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "t", "v"];
    const NUCLEI: [&str; 3] = ["a", "o", "u"];
    const CODAS: [&str; 6] = ["n", "r", "t", "k", "m", "p"];
    let mut pool = Vec::new();
    for o1 in ONSETS {
        for n1 in NUCLEI {
            for c in CODAS {
                for n2 in NUCLEI {
                    let w = format!("{o1}{n1}{c}{n2}{c}");
                    // keep only words the stemmer leaves alone, so stem-level
                    // comparisons in evaluation are exact
                    if stem(&w) == w {
                        pool.push(w);
                    }
                }
            }
        }
    }
    pool.sort();
    pool.dedup();
    pool
}

fn synonym_of(word: &str) -> String {
    format!("zy{word}")
}

pub fn generate(cfg: &SynthConfig) -> Vec<RawRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pool = word_pool();
    // filler words and topic words are disjoint sub-pools
    let (fillers, topics) = pool.split_at(pool.len() / 4);
    (0..cfg.size)
        .map(|_| match cfg.profile {
            SynthProfile::Synonym => synonym_doc(&mut rng, fillers, topics),
            SynthProfile::Ablation => ablation_doc(&mut rng, fillers, topics),
        })
        .collect()
}

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &'a [String]) -> &'a String {
    &pool[rng.gen_range(0..pool.len())]
}

/// Draw `n` distinct words from a pool.
fn pick_distinct(rng: &mut ChaCha8Rng, pool: &[String], n: usize) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(n);
    while out.len() < n {
        let w = pick(rng, pool);
        if !out.contains(w) {
            out.push(w.clone());
        }
    }
    out
}

fn synonym_doc(rng: &mut ChaCha8Rng, fillers: &[String], topics: &[String]) -> RawRecord {
    let len = rng.gen_range(12..=20);
    let mut tokens: Vec<String> = (0..len).map(|_| pick(rng, topics).clone()).collect();
    // sprinkle fillers
    for t in tokens.iter_mut() {
        if rng.gen_bool(0.3) {
            *t = pick(rng, fillers).clone();
        }
    }

    let n_present = rng.gen_range(1..=3);
    let mut present: Vec<Vec<String>> = Vec::new();
    let mut used_starts: Vec<usize> = Vec::new();
    for _ in 0..n_present {
        let plen = rng.gen_range(1..=2);
        let start = rng.gen_range(0..=tokens.len() - plen);
        if used_starts.contains(&start) {
            continue;
        }
        used_starts.push(start);
        let span: Vec<String> = tokens[start..start + plen].to_vec();
        if !present.contains(&span) {
            present.push(span);
        }
    }

    let n_absent = rng.gen_range(1..=2);
    let mut absent: Vec<Vec<String>> = Vec::new();
    for _ in 0..n_absent {
        let plen = rng.gen_range(1..=2);
        let start = rng.gen_range(0..=tokens.len() - plen);
        let span: Vec<String> = tokens[start..start + plen]
            .iter()
            .map(|w| synonym_of(w))
            .collect();
        if !absent.contains(&span) {
            absent.push(span);
        }
    }

    let mut keyphrases: Vec<String> = present
        .iter()
        .chain(absent.iter())
        .map(|p| p.join(" "))
        .collect();
    keyphrases.shuffle(rng);

    let title_len = 3.min(tokens.len());
    RawRecord {
        title: tokens[..title_len].join(" "),
        abstract_text: tokens[title_len..].join(" "),
        keyphrases,
    }
}

fn ablation_doc(rng: &mut ChaCha8Rng, fillers: &[String], topics: &[String]) -> RawRecord {
    let words = pick_distinct(rng, topics, 6);
    let pairs: Vec<(&String, &String)> = vec![
        (&words[0], &words[1]),
        (&words[2], &words[3]),
        (&words[4], &words[5]),
    ];
    let scattered_idx = rng.gen_range(0..3);

    let mut segments: Vec<Vec<String>> = Vec::new();
    for (i, (a, b)) in pairs.iter().enumerate() {
        if i == scattered_idx {
            let gap = rng.gen_range(1..=2);
            let mut seg = vec![(*a).clone()];
            for _ in 0..gap {
                seg.push(pick(rng, fillers).clone());
            }
            seg.push((*b).clone());
            segments.push(seg);
        } else {
            segments.push(vec![(*a).clone(), (*b).clone()]);
        }
    }
    segments.shuffle(rng);

    let mut tokens: Vec<String> = Vec::new();
    for seg in segments {
        for _ in 0..rng.gen_range(1..=2) {
            tokens.push(pick(rng, fillers).clone());
        }
        tokens.extend(seg);
    }
    tokens.push(pick(rng, fillers).clone());

    let mut keyphrases: Vec<String> = pairs
        .iter()
        .enumerate()
        .map(|(_, (a, b))| format!("{a} {b}"))
        .collect();
    // keep gold order random so assembly ordering rules are exercised
    keyphrases.shuffle(rng);

    let title_len = 3.min(tokens.len());
    RawRecord {
        title: tokens[..title_len].join(" "),
        abstract_text: tokens[title_len..].join(" "),
        keyphrases,
    }
}
