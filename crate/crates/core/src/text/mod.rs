//! Text processing: tokenization, Porter stemming, vocabulary.

mod porter;
mod tokenize;
mod vocab;

pub use porter::stem;
pub use tokenize::{tokenize, DIGIT_TOKEN};
pub use vocab::{TokenId, Vocabulary, BOS, EOS, PAD, RESERVED, SEP, UNK};

/// Stem every token of a phrase, for stem-level comparisons.
pub fn stem_phrase(tokens: &[String]) -> Vec<String> {
    tokens.iter().map(|t| stem(t)).collect()
}
