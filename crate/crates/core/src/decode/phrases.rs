use crate::data::contiguous_subsequence;
use crate::error::{Result, SggError};
use crate::text::{stem_phrase, TokenId, Vocabulary, EOS, SEP};

/// Split a decoded token sequence on the separator, dropping empty segments,
/// stopping at eos, and removing stem-level duplicates (first occurrence
/// wins). Token ids are resolved through the vocabulary plus the document's
/// extended table.
pub fn extract_phrases(
    tokens: &[TokenId],
    vocab: &Vocabulary,
    ext_words: &[String],
) -> Vec<Vec<String>> {
    let mut phrases: Vec<Vec<String>> = Vec::new();
    let mut seen_stems: Vec<Vec<String>> = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let push_current = |current: &mut Vec<String>,
                            phrases: &mut Vec<Vec<String>>,
                            seen: &mut Vec<Vec<String>>| {
        if current.is_empty() {
            return;
        }
        let phrase = std::mem::take(current);
        let stems = stem_phrase(&phrase);
        if !seen.contains(&stems) {
            seen.push(stems);
            phrases.push(phrase);
        }
    };
    for &tok in tokens {
        if tok == EOS {
            break;
        }
        if tok == SEP {
            push_current(&mut current, &mut phrases, &mut seen_stems);
            continue;
        }
        let word = if (tok as usize) < vocab.len() {
            vocab.word(tok).unwrap_or("<unk>").to_string()
        } else {
            ext_words
                .get(tok as usize - vocab.len())
                .cloned()
                .unwrap_or_else(|| "<unk>".to_string())
        };
        // pad/bos never carry phrase content
        if word == "<pad>" || word == "<bos>" {
            continue;
        }
        current.push(word);
    }
    push_current(&mut current, &mut phrases, &mut seen_stems);
    phrases
}

/// Token comparison mode for presence checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresenceMode {
    /// Compare stemmed tokens (the evaluation convention).
    Stemmed,
    Raw,
}

/// True iff the phrase occurs as a contiguous subsequence of the source
/// under the selected comparison. An empty phrase is an error.
pub fn is_present(phrase: &[String], source: &[String], mode: PresenceMode) -> Result<bool> {
    if phrase.is_empty() {
        return Err(SggError::Eval("is_present on an empty phrase".into()));
    }
    Ok(match mode {
        PresenceMode::Raw => contiguous_subsequence(phrase, source),
        PresenceMode::Stemmed => {
            let p = stem_phrase(phrase);
            let s = stem_phrase(source);
            contiguous_subsequence(&p, &s)
        }
    })
}
