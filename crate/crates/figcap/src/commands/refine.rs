//! `refine`: produce refined paragraphs for every corpus record, and
//! optionally the assembled generation inputs built from them.

use std::path::PathBuf;

use figcap_core::refine::{assemble_input, refine_record_rule_based, Provenance};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::corpus;
use crate::error::{Error, Result};
use crate::formats::{AssembledRow, RefinementRow};
use crate::jsonl;
use crate::refiner::{ExternalRefiner, RefinerEndpoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineMode {
    Rule,
    External,
}

#[derive(Debug)]
pub struct RefineArgs {
    pub input: PathBuf,
    pub output: String,
    pub mode: RefineMode,
    /// When set, also write assembled generation inputs here.
    pub assemble: Option<String>,
}

pub fn run(config: &RunConfig, args: &RefineArgs) -> Result<()> {
    let records = corpus::parse_corpus(&args.input)?;

    let results = match args.mode {
        RefineMode::Rule => records
            .par_iter()
            .map(|record| {
                refine_record_rule_based(record, config.char_budget).map_err(Error::from)
            })
            .collect::<Result<Vec<_>>>()?,
        RefineMode::External => {
            let endpoint = RefinerEndpoint::from_settings(&config.refiner)?;
            let refiner = ExternalRefiner::new(endpoint)?;
            // A dedicated pool caps concurrent endpoint requests without
            // narrowing the global pool used by other stages.
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.refiner.max_in_flight)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            pool.install(|| {
                records
                    .par_iter()
                    .map(|record| refiner.refine_record(record, config.char_budget))
                    .collect::<Vec<_>>()
            })
        }
    };

    let rows: Vec<RefinementRow> = records
        .iter()
        .zip(&results)
        .map(|(record, result)| RefinementRow {
            id: record.id.clone(),
            result: result.clone(),
        })
        .collect();
    jsonl::write_rows_to(&args.output, &rows)?;

    if let Some(spec) = &args.assemble {
        let assembled: Vec<AssembledRow> = records
            .par_iter()
            .zip(&results)
            .map(|(record, result)| AssembledRow {
                id: record.id.clone(),
                input: assemble_input(
                    record,
                    result,
                    config.merge_policy,
                    config.token_budget,
                    &config.tokenizer,
                ),
            })
            .collect();
        jsonl::write_rows_to(spec, &assembled)?;
    }

    let count = |p: Provenance| results.iter().filter(|r| r.provenance == p).count();
    eprintln!(
        "refined {} records (rule-based: {}, external-llm: {}, passthrough: {})",
        results.len(),
        count(Provenance::RuleBased),
        count(Provenance::ExternalLlm),
        count(Provenance::Passthrough),
    );
    Ok(())
}
