//! Wire formats for the JSONL files exchanged between subcommands.

use figcap_core::metrics::{MetricReport, Normalizer};
use figcap_core::refine::{AssembledInput, RefinementResult};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// One caption keyed by record id (fusion inputs, score inputs). Fusion
/// output names its text `chosen_text`; the alias lets fused files feed
/// `score` directly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaptionRow {
    pub id: String,
    #[serde(alias = "chosen_text")]
    pub caption: String,
}

/// One generated candidate with its per-token log-probabilities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateRow {
    pub text: String,
    pub logprobs: Vec<f64>,
}

/// Ranking input: a reference caption plus scored candidates for one record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateSetRow {
    pub id: String,
    pub reference: String,
    pub reference_logprobs: Vec<f64>,
    pub candidates: Vec<CandidateRow>,
}

/// Ranking output: the loss breakdown for one record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LossRow {
    pub id: String,
    pub l_mul: f64,
    pub l_xent: f64,
    pub l_ctr: f64,
    /// Length-normalized scores in candidate input order.
    pub f_values: Vec<f64>,
    /// Candidate indices from best metric rank to worst.
    pub rank_order: Vec<usize>,
}

/// Fusion output: the consensus choice for one record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FusionRow {
    pub id: String,
    pub chosen_index: usize,
    pub chosen_text: String,
    pub scores: Vec<f64>,
}

/// Refinement output for one record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinementRow {
    pub id: String,
    #[serde(flatten)]
    pub result: RefinementResult,
}

/// Assembled generation input for one record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssembledRow {
    pub id: String,
    #[serde(flatten)]
    pub input: AssembledInput,
}

/// Corpus-level metric report emitted by `score` and consumed by `report`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreReport {
    /// Row label, e.g. a model or run name.
    pub method: String,
    /// Number of prediction/reference pairs aggregated.
    pub pairs: usize,
    pub normalizer: Normalizer,
    #[serde(flatten)]
    pub metrics: MetricReport,
    /// Effective configuration the scores were produced under.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
}
