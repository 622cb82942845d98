//! `ingest`: validate a corpus file and print summary statistics.

use std::path::Path;

use crate::corpus;
use crate::error::Result;

pub fn run(input: &Path) -> Result<()> {
    let records = corpus::parse_corpus(input)?;
    let stats = corpus::corpus_stats(&records);
    println!("records: {}", stats.records);
    println!("mention coverage: {:.1}%", stats.mention_coverage());
    println!("ocr-alt coverage: {:.1}%", stats.ocr_alt_coverage());
    Ok(())
}
