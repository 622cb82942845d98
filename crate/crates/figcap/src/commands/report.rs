//! `report`: render score reports side by side as one table.

use std::path::PathBuf;

use crate::error::Result;
use crate::formats::ScoreReport;
use crate::jsonl;
use crate::report::render_table;

pub fn run(inputs: &[PathBuf]) -> Result<()> {
    let mut reports: Vec<ScoreReport> = Vec::new();
    for path in inputs {
        reports.extend(jsonl::read_rows(path)?);
    }
    print!("{}", render_table(&reports));
    Ok(())
}
