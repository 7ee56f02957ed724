use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Result, SggError};

pub type TokenId = u32;

pub const PAD: TokenId = 0;
pub const UNK: TokenId = 1;
pub const BOS: TokenId = 2;
pub const EOS: TokenId = 3;
pub const SEP: TokenId = 4;

/// Reserved tokens occupy the lowest ids, in this order.
pub const RESERVED: [&str; 5] = ["<pad>", "<unk>", "<bos>", "<eos>", "<sep>"];

/// Bidirectional word/id map with reserved special tokens. Ids are dense in
/// `[0, len)`; immutable after build.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    words: Vec<String>,
    freqs: Vec<u64>,
    index: HashMap<String, TokenId>,
}

impl Vocabulary {
    /// Build from word frequencies: reserved tokens first, then words by
    /// descending frequency with ties broken lexicographically, truncated
    /// at `cap` total entries.
    pub fn from_counts(counts: &HashMap<String, u64>, cap: usize) -> Result<Self> {
        if cap < RESERVED.len() {
            return Err(SggError::Vocab(format!(
                "cap {cap} smaller than the {} reserved tokens",
                RESERVED.len()
            )));
        }
        let mut ranked: Vec<(&String, u64)> = counts
            .iter()
            .filter(|(w, _)| !RESERVED.contains(&w.as_str()))
            .map(|(w, &f)| (w, f))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.truncate(cap - RESERVED.len());

        let mut words: Vec<String> = RESERVED.iter().map(|s| s.to_string()).collect();
        let mut freqs: Vec<u64> = vec![0; RESERVED.len()];
        for (w, f) in ranked {
            words.push(w.clone());
            freqs.push(f);
        }
        Ok(Self::from_parts(words, freqs))
    }

    /// Build by counting every token of the supplied sequences.
    pub fn build<'a, I, S>(token_seqs: I, cap: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [S]>,
        S: AsRef<str> + 'a,
    {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for seq in token_seqs {
            for tok in seq {
                *counts.entry(tok.as_ref().to_string()).or_insert(0) += 1;
            }
        }
        Self::from_counts(&counts, cap)
    }

    fn from_parts(words: Vec<String>, freqs: Vec<u64>) -> Self {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as TokenId))
            .collect();
        Vocabulary { words, freqs, index }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<TokenId> {
        self.index.get(word).copied()
    }

    pub fn id_or_unk(&self, word: &str) -> TokenId {
        self.id(word).unwrap_or(UNK)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn word(&self, id: TokenId) -> Option<&str> {
        self.words.get(id as usize).map(|s| s.as_str())
    }

    pub fn frequency(&self, id: TokenId) -> Option<u64> {
        self.freqs.get(id as usize).copied()
    }

    /// SHA-256 over the id-ordered entries; stored in checkpoints so a model
    /// can refuse to load against the wrong vocabulary.
    pub fn content_hash(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        for (w, f) in self.words.iter().zip(&self.freqs) {
            hasher.update(w.as_bytes());
            hasher.update(b"\t");
            hasher.update(f.to_le_bytes());
        }
        hasher.finalize().into()
    }

    /// One `word<TAB>frequency` per line, ordered by id.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for (w, f) in self.words.iter().zip(&self.freqs) {
            out.push_str(w);
            out.push('\t');
            out.push_str(&f.to_string());
            out.push('\n');
        }
        let mut file =
            std::fs::File::create(path).map_err(|e| SggError::io(path, e))?;
        file.write_all(out.as_bytes())
            .map_err(|e| SggError::io(path, e))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| SggError::io(path, e))?;
        let mut words = Vec::new();
        let mut freqs = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| SggError::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let (word, freq) = line.split_once('\t').ok_or_else(|| SggError::Vocab(
                format!("{}: line {} missing tab separator", path.display(), i + 1),
            ))?;
            let freq: u64 = freq.parse().map_err(|_| {
                SggError::Vocab(format!(
                    "{}: line {} has invalid frequency {freq:?}",
                    path.display(),
                    i + 1
                ))
            })?;
            words.push(word.to_string());
            freqs.push(freq);
        }
        for (i, expected) in RESERVED.iter().enumerate() {
            if words.get(i).map(|s| s.as_str()) != Some(*expected) {
                return Err(SggError::Vocab(format!(
                    "{}: reserved token {i} should be {expected}",
                    path.display()
                )));
            }
        }
        Ok(Self::from_parts(words, freqs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(pairs: &[(&str, u64)]) -> HashMap<String, u64> {
        pairs.iter().map(|(w, f)| (w.to_string(), *f)).collect()
    }

    #[test]
    fn frequency_then_lexicographic_order_with_cap() {
        let v = Vocabulary::from_counts(&counts(&[("a", 3), ("b", 1), ("c", 1)]), 7).unwrap();
        assert_eq!(v.len(), 7);
        assert_eq!(v.word(5), Some("a"));
        assert_eq!(v.word(6), Some("b"));
        assert_eq!(v.id("c"), None);
    }

    #[test]
    fn reserved_only_vocabulary() {
        let v = Vocabulary::from_counts(&counts(&[("a", 3)]), 5).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v.word(PAD), Some("<pad>"));
        assert_eq!(v.word(SEP), Some("<sep>"));
        assert_eq!(v.id_or_unk("a"), UNK);
    }

    #[test]
    fn cap_below_reserved_is_error() {
        assert!(Vocabulary::from_counts(&counts(&[]), 4).is_err());
    }

    #[test]
    fn save_load_roundtrip(){
        let v = Vocabulary::from_counts(&counts(&[("beta", 2), ("alpha", 9)]), 10).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.tsv");
        v.save(&path).unwrap();
        let loaded = Vocabulary::load(&path).unwrap();
        assert_eq!(loaded.len(), v.len());
        assert_eq!(loaded.id("alpha"), v.id("alpha"));
        assert_eq!(loaded.content_hash(), v.content_hash());
        // byte-identical second save
        let path2 = dir.path().join("vocab2.tsv");
        loaded.save(&path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }
}
