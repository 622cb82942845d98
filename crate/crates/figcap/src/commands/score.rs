//! `score`: corpus-level metrics for predictions against references.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use figcap_core::metrics::{mean_report, pair_report, MetricReport};
use figcap_core::text::tokenize;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::formats::{CaptionRow, ScoreReport};
use crate::jsonl;
use crate::report::render_table;

#[derive(Debug)]
pub struct ScoreArgs {
    pub predictions: PathBuf,
    pub references: PathBuf,
    /// Row label in the rendered table.
    pub label: String,
    /// When set, also write the JSON report here.
    pub json: Option<String>,
}

pub fn run(config: &RunConfig, args: &ScoreArgs) -> Result<()> {
    let preds: Vec<(usize, CaptionRow)> = jsonl::read_rows_numbered(&args.predictions)?;
    let refs: Vec<(usize, CaptionRow)> = jsonl::read_rows_numbered(&args.references)?;
    jsonl::check_unique_ids(
        &args.predictions,
        preds.iter().map(|(line, row)| (*line, row.id.as_str())),
    )?;
    jsonl::check_unique_ids(
        &args.references,
        refs.iter().map(|(line, row)| (*line, row.id.as_str())),
    )?;

    let ref_map: HashMap<&str, &str> = refs
        .iter()
        .map(|(_, row)| (row.id.as_str(), row.caption.as_str()))
        .collect();
    let mut pairs = Vec::with_capacity(preds.len());
    for (_, row) in &preds {
        let reference = ref_map.get(row.id.as_str()).ok_or_else(|| {
            Error::Validation(format!(
                "id `{}` present in {} but missing from {}",
                row.id,
                args.predictions.display(),
                args.references.display()
            ))
        })?;
        pairs.push((row.caption.as_str(), *reference));
    }
    if refs.len() > preds.len() {
        let pred_ids: HashSet<&str> = preds.iter().map(|(_, r)| r.id.as_str()).collect();
        if let Some((_, missing)) = refs.iter().find(|(_, r)| !pred_ids.contains(r.id.as_str())) {
            return Err(Error::Validation(format!(
                "id `{}` present in {} but missing from {}",
                missing.id,
                args.references.display(),
                args.predictions.display()
            )));
        }
    }

    let per_pair: Vec<MetricReport> = pairs
        .par_iter()
        .map(|(candidate, reference)| {
            let candidate = tokenize(candidate, &config.tokenizer);
            let reference = tokenize(reference, &config.tokenizer);
            pair_report(&candidate, &reference, config.normalizer).map_err(Error::from)
        })
        .collect::<Result<Vec<_>>>()?;
    let metrics = mean_report(&per_pair)?;

    let report = ScoreReport {
        method: args.label.clone(),
        pairs: per_pair.len(),
        normalizer: config.normalizer,
        metrics,
        config: Some(config.clone()),
    };
    print!("{}", render_table(std::slice::from_ref(&report)));
    println!("{}", serde_json::to_string(&report)?);
    if let Some(spec) = &args.json {
        jsonl::write_rows_to(spec, std::slice::from_ref(&report))?;
    }
    Ok(())
}
