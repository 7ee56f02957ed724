/// Replacement token for digit-only tokens.
pub const DIGIT_TOKEN: &str = "<digit>";

/// Lowercase and split on whitespace and punctuation. Punctuation never
/// survives: runs of alphanumeric characters become tokens, so hyphenated
/// words split into their parts. Digit-only tokens become [`DIGIT_TOKEN`].
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            for lc in ch.to_lowercase() {
                cur.push(lc);
            }
        } else if !cur.is_empty() {
            out.push(finish(std::mem::take(&mut cur)));
        }
    }
    if !cur.is_empty() {
        out.push(finish(cur));
    }
    out
}

fn finish(tok: String) -> String {
    if tok.chars().all(|c| c.is_numeric()) {
        DIGIT_TOKEN.to_string()
    } else {
        tok
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn splits_punctuation_and_replaces_digits() {
        assert_eq!(
            toks("Graph-based Ranking: 2 steps."),
            vec!["graph", "based", "ranking", "<digit>", "steps"]
        );
    }

    #[test]
    fn empty_text_gives_empty_sequence() {
        assert_eq!(toks(""), Vec::<String>::new());
        assert_eq!(toks("  \t\n"), Vec::<String>::new());
    }

    #[test]
    fn lowercases() {
        assert_eq!(toks("LSTM networks"), vec!["lstm", "networks"]);
    }

    #[test]
    fn mixed_alnum_kept_verbatim() {
        assert_eq!(toks("word2vec 42 a1"), vec!["word2vec", "<digit>", "a1"]);
    }
}
