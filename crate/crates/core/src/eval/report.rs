use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{split_keyphrases, RawRecord};
use crate::decode::DocPrediction;
use crate::error::{Result, SggError};
use crate::eval::metrics::{absent_proportion, f1_at_k, overlap_proportion, recall_at_k};
use crate::text::{stem_phrase, tokenize};

/// Per-document metric detail.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DocDetail {
    pub doc_id: usize,
    pub f1_at: BTreeMap<usize, f64>,
    pub recall_at: BTreeMap<usize, f64>,
}

/// Corpus-level metric aggregate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    /// Macro-averaged exact-match F1 for the present stream.
    pub f1_at: BTreeMap<usize, f64>,
    /// Macro-averaged stemmed recall for the absent stream.
    pub recall_at: BTreeMap<usize, f64>,
    /// Fraction of top-10 predictions that are absent from their source.
    pub absent_proportion: f64,
    /// Fraction of documents whose generator top-1 overlaps selector top-1.
    pub overlap_proportion: f64,
    pub documents: usize,
    pub present_documents_scored: usize,
    pub absent_documents_scored: usize,
    pub details: Vec<DocDetail>,
}

const F1_KS: [usize; 2] = [5, 10];
const RECALL_KS: [usize; 2] = [10, 50];

/// Score predictions against gold records. Gold phrases are re-derived with
/// the same tokenization and present/absent split as training; documents
/// with an empty gold stream are skipped for that stream's average.
pub fn evaluate_corpus(
    predictions: &[DocPrediction],
    records: &[RawRecord],
) -> Result<EvalReport> {
    if predictions.len() != records.len() {
        return Err(SggError::Eval(format!(
            "{} predictions for {} gold records",
            predictions.len(),
            records.len()
        )));
    }

    let mut f1_sums: BTreeMap<usize, f64> = F1_KS.iter().map(|&k| (k, 0.0)).collect();
    let mut recall_sums: BTreeMap<usize, f64> = RECALL_KS.iter().map(|&k| (k, 0.0)).collect();
    let mut present_scored = 0usize;
    let mut absent_scored = 0usize;
    let mut details = Vec::with_capacity(records.len());
    let mut sources = Vec::with_capacity(records.len());
    let mut all_predictions = Vec::with_capacity(records.len());
    let mut sel_top1 = Vec::with_capacity(records.len());
    let mut gen_top1 = Vec::with_capacity(records.len());

    for (pred, record) in predictions.iter().zip(records) {
        let mut source = tokenize(&record.title);
        source.extend(tokenize(&record.abstract_text));
        let keyphrases: Vec<Vec<String>> = record
            .keyphrases
            .iter()
            .map(|k| tokenize(k))
            .filter(|k| !k.is_empty())
            .collect();
        let (gold_present, gold_absent) = split_keyphrases(&source, &keyphrases);
        let gold_present = dedup_exact(gold_present);
        let gold_absent = dedup_stemmed(gold_absent);

        let mut detail = DocDetail {
            doc_id: pred.doc_id,
            f1_at: BTreeMap::new(),
            recall_at: BTreeMap::new(),
        };
        if !gold_present.is_empty() {
            present_scored += 1;
            for &k in &F1_KS {
                let s = f1_at_k(&pred.present, &gold_present, k)?;
                *f1_sums.get_mut(&k).unwrap() += s.f1;
                detail.f1_at.insert(k, s.f1);
            }
        }
        if !gold_absent.is_empty() {
            absent_scored += 1;
            for &k in &RECALL_KS {
                let r = recall_at_k(&pred.absent, &gold_absent, k)?;
                *recall_sums.get_mut(&k).unwrap() += r;
                detail.recall_at.insert(k, r);
            }
        }
        details.push(detail);

        all_predictions.push(pred.absent.clone());
        sources.push(source);
        sel_top1.push(pred.present.first().cloned());
        gen_top1.push(pred.absent.first().cloned());
    }

    let f1_at = f1_sums
        .into_iter()
        .map(|(k, s)| (k, s / present_scored.max(1) as f64))
        .collect();
    let recall_at = recall_sums
        .into_iter()
        .map(|(k, s)| (k, s / absent_scored.max(1) as f64))
        .collect();
    let absent_prop = absent_proportion(&all_predictions, &sources, 10)?;
    let overlap = overlap_proportion(&sel_top1, &gen_top1)?;

    Ok(EvalReport {
        f1_at,
        recall_at,
        absent_proportion: absent_prop,
        overlap_proportion: overlap,
        documents: records.len(),
        present_documents_scored: present_scored,
        absent_documents_scored: absent_scored,
        details,
    })
}

fn dedup_exact(phrases: Vec<Vec<String>>) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for p in phrases {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn dedup_stemmed(phrases: Vec<Vec<String>>) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    let mut seen: Vec<Vec<String>> = Vec::new();
    for p in phrases {
        let stems = stem_phrase(&p);
        if !seen.contains(&stems) {
            seen.push(stems);
            out.push(p);
        }
    }
    out
}

impl EvalReport {
    /// Write the report as line-delimited JSON: one summary line followed by
    /// one line per document.
    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        #[derive(Serialize)]
        struct Summary<'a> {
            kind: &'static str,
            f1_at: &'a BTreeMap<usize, f64>,
            recall_at: &'a BTreeMap<usize, f64>,
            absent_proportion: f64,
            overlap_proportion: f64,
            documents: usize,
            present_documents_scored: usize,
            absent_documents_scored: usize,
        }
        #[derive(Serialize)]
        struct DetailLine<'a> {
            kind: &'static str,
            #[serde(flatten)]
            detail: &'a DocDetail,
        }
        let mut out = String::new();
        out.push_str(
            &serde_json::to_string(&Summary {
                kind: "summary",
                f1_at: &self.f1_at,
                recall_at: &self.recall_at,
                absent_proportion: self.absent_proportion,
                overlap_proportion: self.overlap_proportion,
                documents: self.documents,
                present_documents_scored: self.present_documents_scored,
                absent_documents_scored: self.absent_documents_scored,
            })
            .expect("summary serializes"),
        );
        out.push('\n');
        for d in &self.details {
            out.push_str(
                &serde_json::to_string(&DetailLine {
                    kind: "document",
                    detail: d,
                })
                .expect("detail serializes"),
            );
            out.push('\n');
        }
        let mut file = std::fs::File::create(path).map_err(|e| SggError::io(path, e))?;
        file.write_all(out.as_bytes())
            .map_err(|e| SggError::io(path, e))?;
        Ok(())
    }
}

/// Text table for terminal output.
pub fn render_table(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str("metric              value\n");
    out.push_str("------------------  ------\n");
    for (k, v) in &report.f1_at {
        out.push_str(&format!("present F1@{k:<7} {v:.4}\n"));
    }
    for (k, v) in &report.recall_at {
        out.push_str(&format!("absent  R@{k:<8} {v:.4}\n"));
    }
    out.push_str(&format!(
        "absent proportion   {:.4}\n",
        report.absent_proportion
    ));
    out.push_str(&format!(
        "overlap proportion  {:.4}\n",
        report.overlap_proportion
    ));
    out.push_str(&format!(
        "documents           {} ({} present-scored, {} absent-scored)\n",
        report.documents, report.present_documents_scored, report.absent_documents_scored
    ));
    out
}
