//! Corpus loading and summary statistics.

use std::collections::HashSet;
use std::path::Path;

use figcap_core::refine::{most_mentioned_figure, FigureRecord};

use crate::error::{Error, Result};
use crate::jsonl;

/// Loads a corpus file and validates record identity: ids must be nonempty
/// and unique within the file.
pub fn parse_corpus(path: &Path) -> Result<Vec<FigureRecord>> {
    let rows: Vec<(usize, FigureRecord)> = jsonl::read_rows_numbered(path)?;
    let mut seen = HashSet::new();
    for (line, record) in &rows {
        if record.id.is_empty() {
            return Err(Error::Format {
                path: path.display().to_string(),
                line: *line,
                message: "record has an empty id".into(),
            });
        }
        if !seen.insert(record.id.as_str()) {
            return Err(Error::Format {
                path: path.display().to_string(),
                line: *line,
                message: format!("duplicate id `{}`", record.id),
            });
        }
    }
    Ok(rows.into_iter().map(|(_, record)| record).collect())
}

/// Corpus-level counts reported by `ingest`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestStats {
    pub records: usize,
    /// Records whose mentions resolve to a figure or table target.
    pub resolvable_mentions: usize,
    /// Records carrying an alternate OCR stream.
    pub with_ocr_alt: usize,
}

impl IngestStats {
    pub fn mention_coverage(&self) -> f64 {
        percentage(self.resolvable_mentions, self.records)
    }

    pub fn ocr_alt_coverage(&self) -> f64 {
        percentage(self.with_ocr_alt, self.records)
    }
}

fn percentage(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

/// Computes summary statistics over a parsed corpus.
pub fn corpus_stats(records: &[FigureRecord]) -> IngestStats {
    let resolvable_mentions = records
        .iter()
        .filter(|r| most_mentioned_figure(&r.mentions).is_ok())
        .count();
    let with_ocr_alt = records.iter().filter(|r| r.ocr_alt.is_some()).count();
    IngestStats {
        records: records.len(),
        resolvable_mentions,
        with_ocr_alt,
    }
}
