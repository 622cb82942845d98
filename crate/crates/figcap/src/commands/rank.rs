//! `rank`: contrastive and cross-entropy losses per candidate set.

use std::path::PathBuf;

use figcap_core::ranking::{loss_breakdown, CandidateSet, ScoredCandidate};
use figcap_core::text::tokenize;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::formats::{CandidateSetRow, LossRow};
use crate::jsonl;

#[derive(Debug)]
pub struct RankArgs {
    pub input: PathBuf,
    pub output: String,
}

pub fn run(config: &RunConfig, args: &RankArgs) -> Result<()> {
    let rows: Vec<(usize, CandidateSetRow)> = jsonl::read_rows_numbered(&args.input)?;
    jsonl::check_unique_ids(&args.input, rows.iter().map(|(line, row)| (*line, row.id.as_str())))?;
    let loss_config = config.loss_config();

    let out: Vec<LossRow> = rows
        .par_iter()
        .map(|(_, row)| {
            let build = || -> figcap_core::Result<_> {
                let candidates = row
                    .candidates
                    .iter()
                    .map(|c| {
                        ScoredCandidate::new(c.text.as_str(), c.logprobs.clone(), &config.tokenizer)
                    })
                    .collect::<figcap_core::Result<Vec<_>>>()?;
                let reference = tokenize(&row.reference, &config.tokenizer);
                let set = CandidateSet::new(reference, candidates)?;
                loss_breakdown(&set, &row.reference_logprobs, &loss_config)
            };
            let breakdown = build()
                .map_err(|e| Error::Validation(format!("candidate set `{}`: {e}", row.id)))?;
            Ok(LossRow {
                id: row.id.clone(),
                l_mul: breakdown.l_mul,
                l_xent: breakdown.l_xent,
                l_ctr: breakdown.l_ctr,
                f_values: breakdown.f_values,
                rank_order: breakdown.rank_order,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    jsonl::write_rows_to(&args.output, &out)?;

    if !out.is_empty() {
        let n = out.len() as f64;
        let mean = |f: fn(&LossRow) -> f64| out.iter().map(f).sum::<f64>() / n;
        let summary = serde_json::json!({
            "mean_l_mul": mean(|r| r.l_mul),
            "mean_l_xent": mean(|r| r.l_xent),
            "mean_l_ctr": mean(|r| r.l_ctr),
        });
        println!("{summary}");
    }
    Ok(())
}
