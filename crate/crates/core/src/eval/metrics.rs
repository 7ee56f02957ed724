use crate::data::contiguous_subsequence;
use crate::decode::{is_present, PresenceMode};
use crate::error::{Result, SggError};
use crate::text::stem_phrase;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrfScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Exact-match F1 over the top-k predictions of one document.
/// P = correct / min(k, |pred|) (0 when no predictions), R = correct / |gold|.
pub fn f1_at_k(
    predictions: &[Vec<String>],
    gold: &[Vec<String>],
    k: usize,
) -> Result<PrfScores> {
    if k < 1 {
        return Err(SggError::Eval("k must be at least 1".into()));
    }
    if gold.is_empty() {
        return Err(SggError::Eval("f1_at_k needs a non-empty gold set".into()));
    }
    let top: &[Vec<String>] = &predictions[..predictions.len().min(k)];
    let correct = top.iter().filter(|p| gold.contains(p)).count() as f64;
    let precision = if top.is_empty() {
        0.0
    } else {
        correct / top.len() as f64
    };
    let recall = correct / gold.len() as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(PrfScores {
        precision,
        recall,
        f1,
    })
}

/// Stemmed-match recall over the top-k predictions of one document.
pub fn recall_at_k(predictions: &[Vec<String>], gold: &[Vec<String>], k: usize) -> Result<f64> {
    if k < 1 {
        return Err(SggError::Eval("k must be at least 1".into()));
    }
    if gold.is_empty() {
        return Err(SggError::Eval(
            "recall_at_k needs a non-empty gold set".into(),
        ));
    }
    let top: Vec<Vec<String>> = predictions
        .iter()
        .take(k)
        .map(|p| stem_phrase(p))
        .collect();
    let gold_stems: Vec<Vec<String>> = gold.iter().map(|p| stem_phrase(p)).collect();
    let hit = gold_stems.iter().filter(|g| top.contains(g)).count() as f64;
    Ok(hit / gold_stems.len() as f64)
}

/// Fraction of top-n predicted phrases classified absent (stemmed contiguity
/// check against the source), pooled over all documents.
pub fn absent_proportion(
    predictions_per_doc: &[Vec<Vec<String>>],
    sources: &[Vec<String>],
    top_n: usize,
) -> Result<f64> {
    if predictions_per_doc.len() != sources.len() {
        return Err(SggError::Eval(
            "predictions and sources have different document counts".into(),
        ));
    }
    let mut total = 0usize;
    let mut absent = 0usize;
    for (preds, source) in predictions_per_doc.iter().zip(sources) {
        for phrase in preds.iter().take(top_n) {
            if phrase.is_empty() {
                continue;
            }
            total += 1;
            if !is_present(phrase, source, PresenceMode::Stemmed)? {
                absent += 1;
            }
        }
    }
    Ok(if total == 0 {
        0.0
    } else {
        absent as f64 / total as f64
    })
}

/// True when the generator phrase stem-matches the selector phrase or is a
/// contiguous sub/super-sequence of it.
pub fn phrases_overlap(generator: &[String], selector: &[String]) -> bool {
    if generator.is_empty() || selector.is_empty() {
        return false;
    }
    let g = stem_phrase(generator);
    let s = stem_phrase(selector);
    g == s || contiguous_subsequence(&g, &s) || contiguous_subsequence(&s, &g)
}

/// Fraction of documents whose generator top-1 overlaps the selector top-1.
/// Documents lacking either top-1 are skipped.
pub fn overlap_proportion(
    selector_top1: &[Option<Vec<String>>],
    generator_top1: &[Option<Vec<String>>],
) -> Result<f64> {
    if selector_top1.len() != generator_top1.len() {
        return Err(SggError::Eval(
            "selector and generator document counts differ".into(),
        ));
    }
    let mut counted = 0usize;
    let mut overlapping = 0usize;
    for (sel, gen) in selector_top1.iter().zip(generator_top1) {
        if let (Some(sel), Some(gen)) = (sel, gen) {
            counted += 1;
            if phrases_overlap(gen, sel) {
                overlapping += 1;
            }
        }
    }
    Ok(if counted == 0 {
        0.0
    } else {
        overlapping as f64 / counted as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn perfect_predictions_give_f1_one() {
        let gold = vec![p(&["a"]), p(&["b", "c"])];
        let scores = f1_at_k(&gold.clone(), &gold, 5).unwrap();
        assert_eq!(scores.f1, 1.0);
    }

    #[test]
    fn disjoint_sets_give_zero() {
        let scores = f1_at_k(&[p(&["x"])], &[p(&["y"])], 5).unwrap();
        assert_eq!(scores.f1, 0.0);
    }

    #[test]
    fn closed_form_example() {
        // top-5 with 2 correct, |gold| = 3: P = 0.4, R = 2/3, F1 = 0.5
        let gold = vec![p(&["g1"]), p(&["g2"]), p(&["g3"])];
        let preds = vec![p(&["g1"]), p(&["x1"]), p(&["g2"]), p(&["x2"]), p(&["x3"])];
        let scores = f1_at_k(&preds, &gold, 5).unwrap();
        assert!((scores.precision - 0.4).abs() < 1e-12);
        assert!((scores.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((scores.f1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_predictions_give_zero_precision() {
        let scores = f1_at_k(&[], &[p(&["g"])], 5).unwrap();
        assert_eq!(scores.precision, 0.0);
        assert_eq!(scores.f1, 0.0);
    }

    #[test]
    fn k_must_be_positive() {
        assert!(f1_at_k(&[], &[p(&["g"])], 0).is_err());
        assert!(recall_at_k(&[], &[p(&["g"])], 0).is_err());
    }

    #[test]
    fn recall_full_and_zero() {
        let gold = vec![p(&["a"]), p(&["b"])];
        assert_eq!(recall_at_k(&gold.clone(), &gold, 50).unwrap(), 1.0);
        assert_eq!(recall_at_k(&[p(&["x"])], &gold, 50).unwrap(), 0.0);
    }

    #[test]
    fn recall_matches_after_stemming() {
        let gold = vec![p(&["neural", "network"])];
        let preds = vec![p(&["neural", "networks"])];
        assert_eq!(recall_at_k(&preds, &gold, 50).unwrap(), 1.0);
    }

    #[test]
    fn f1_permutation_invariant_within_topk() {
        let gold = vec![p(&["g1"]), p(&["g2"])];
        let a = vec![p(&["g1"]), p(&["x"]), p(&["g2"])];
        let b = vec![p(&["g2"]), p(&["g1"]), p(&["x"])];
        assert_eq!(
            f1_at_k(&a, &gold, 3).unwrap().f1,
            f1_at_k(&b, &gold, 3).unwrap().f1
        );
    }

    #[test]
    fn absent_proportion_counts() {
        let source = p(&["a", "b", "c"]);
        let preds = vec![vec![
            p(&["a", "b"]),  // present
            p(&["c"]),       // present
            p(&["a", "c"]),  // scattered: absent
            p(&["z"]),       // absent
        ]];
        let ratio = absent_proportion(&preds, &[source], 10).unwrap();
        assert!((ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn absent_proportion_extremes() {
        let source = p(&["a", "b"]);
        assert_eq!(
            absent_proportion(&[vec![p(&["a"]), p(&["b"])]], &[source.clone()], 10).unwrap(),
            0.0
        );
        assert_eq!(
            absent_proportion(&[vec![p(&["z"]), p(&["q"])]], &[source], 10).unwrap(),
            1.0
        );
    }

    #[test]
    fn overlap_rules() {
        assert!(phrases_overlap(&p(&["implicit", "surfaces"]), &p(&["implicit", "surfaces"])));
        assert!(phrases_overlap(&p(&["surfaces"]), &p(&["implicit", "surfaces"])));
        assert!(phrases_overlap(&p(&["implicit", "surface"]), &p(&["implicit", "surfaces"])));
        assert!(!phrases_overlap(&p(&["particle", "constraint"]), &p(&["implicit", "surfaces"])));
        let sel = vec![Some(p(&["a", "b"])), Some(p(&["c"])), None];
        let gen = vec![Some(p(&["a", "b"])), Some(p(&["d"])), Some(p(&["e"]))];
        assert_eq!(overlap_proportion(&sel, &gen).unwrap(), 0.5);
    }
}
