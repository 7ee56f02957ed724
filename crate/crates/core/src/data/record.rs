use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SggError};

/// One document with its gold keyphrases. Stored one JSON object per line.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RawRecord {
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub keyphrases: Vec<String>,
}

/// Read line-delimited records; malformed lines are reported with their
/// 1-based line number.
pub fn read_records(path: &Path) -> Result<Vec<RawRecord>> {
    let file = std::fs::File::open(path).map_err(|e| SggError::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| SggError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord = serde_json::from_str(&line).map_err(|e| SggError::Record {
            line: i + 1,
            detail: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

pub fn write_records(path: &Path, records: &[RawRecord]) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    let mut file = std::fs::File::create(path).map_err(|e| SggError::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| SggError::io(path, e))?;
    Ok(())
}
