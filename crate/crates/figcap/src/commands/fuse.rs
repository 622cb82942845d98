//! `fuse`: consensus caption selection across parallel model outputs.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use figcap_core::fusion::{consensus_select, FusionInput};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::formats::{CaptionRow, FusionRow};
use crate::jsonl;

#[derive(Debug)]
pub struct FuseArgs {
    /// One caption file per model; the first defines the output order.
    pub inputs: Vec<PathBuf>,
    pub output: String,
}

/// Derives a distinct label per input file from its stem.
fn model_names(paths: &[PathBuf]) -> Vec<String> {
    let mut used: HashMap<String, usize> = HashMap::new();
    paths
        .iter()
        .map(|path| {
            let base = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "model".into());
            let n = used.entry(base.clone()).or_insert(0);
            *n += 1;
            if *n == 1 {
                base
            } else {
                format!("{base}-{n}")
            }
        })
        .collect()
}

fn load_stream(path: &Path) -> Result<Vec<(usize, CaptionRow)>> {
    let rows: Vec<(usize, CaptionRow)> = jsonl::read_rows_numbered(path)?;
    jsonl::check_unique_ids(path, rows.iter().map(|(line, row)| (*line, row.id.as_str())))?;
    Ok(rows)
}

pub fn run(config: &RunConfig, args: &FuseArgs) -> Result<()> {
    let names = model_names(&args.inputs);
    let first = load_stream(&args.inputs[0])?;
    let mut maps: Vec<HashMap<String, String>> = Vec::with_capacity(args.inputs.len() - 1);
    for path in &args.inputs[1..] {
        let rows = load_stream(path)?;
        if rows.len() != first.len() {
            let first_ids: std::collections::HashSet<&str> =
                first.iter().map(|(_, r)| r.id.as_str()).collect();
            if let Some((_, extra)) = rows.iter().find(|(_, r)| !first_ids.contains(r.id.as_str()))
            {
                return Err(Error::Validation(format!(
                    "id `{}` present in {} but missing from {}",
                    extra.id,
                    path.display(),
                    args.inputs[0].display()
                )));
            }
        }
        maps.push(
            rows.into_iter()
                .map(|(_, row)| (row.id, row.caption))
                .collect(),
        );
    }

    let mut aligned: Vec<(String, Vec<(String, String)>)> = Vec::with_capacity(first.len());
    for (_, row) in first {
        let mut candidates = Vec::with_capacity(args.inputs.len());
        candidates.push((names[0].clone(), row.caption));
        for (map, (name, path)) in maps
            .iter()
            .zip(names[1..].iter().zip(&args.inputs[1..]))
        {
            let caption = map.get(&row.id).ok_or_else(|| {
                Error::Validation(format!(
                    "id `{}` present in {} but missing from {}",
                    row.id,
                    args.inputs[0].display(),
                    path.display()
                ))
            })?;
            candidates.push((name.clone(), caption.clone()));
        }
        aligned.push((row.id, candidates));
    }

    let rows: Vec<FusionRow> = aligned
        .into_par_iter()
        .map(|(id, candidates)| {
            let input = FusionInput::new(id.clone(), candidates)
                .map_err(|e| Error::Validation(format!("record `{id}`: {e}")))?;
            let result =
                consensus_select(&input, config.metric_n, config.normalizer, &config.tokenizer)
                    .map_err(|e| Error::Validation(format!("record `{id}`: {e}")))?;
            Ok(FusionRow {
                id,
                chosen_index: result.chosen_index,
                chosen_text: result.chosen_text,
                scores: result.scores,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    jsonl::write_rows_to(&args.output, &rows)?;
    eprintln!("fused {} records from {} models", rows.len(), args.inputs.len());
    Ok(())
}
