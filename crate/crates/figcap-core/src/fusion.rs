//! Consensus fusion over captions produced by several models: each candidate
//! is scored by the mean normalized ROUGE of the other candidates against it,
//! and the highest-consensus candidate wins. This is a minimum-Bayes-risk
//! style decision rule; no model weights or training are involved.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::metrics::{rouge_n_normalized, Normalizer};
use crate::text::{tokenize, TokenSequence, TokenizerConfig};

/// One figure's candidate captions, one per model, in a fixed model order.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionInput {
    id: String,
    candidates: Vec<(String, String)>,
}

impl FusionInput {
    /// `candidates` pairs a model name with its caption; names must be unique
    /// and at least one candidate is required.
    pub fn new(id: impl Into<String>, candidates: Vec<(String, String)>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidArgument("fusion needs at least one candidate"));
        }
        for (i, (name, _)) in candidates.iter().enumerate() {
            if candidates[..i].iter().any(|(seen, _)| seen == name) {
                return Err(Error::InvalidArgument("fusion model names must be unique"));
            }
        }
        Ok(Self { id: id.into(), candidates })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn candidates(&self) -> &[(String, String)] {
        &self.candidates
    }
}

/// Outcome of consensus selection for one figure.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FusionResult {
    /// Index of the winning candidate; ties go to the lowest index.
    pub chosen_index: usize,
    pub chosen_text: String,
    /// Consensus score per candidate, aligned with the input order.
    pub scores: Vec<f64>,
    /// `score_matrix[i][j]` scores candidate j against candidate i as the
    /// reference; the diagonal is zero. Not symmetric in general: the
    /// length-ratio normalizer depends on which side is the reference.
    pub score_matrix: Vec<Vec<f64>>,
}

/// Pairwise normalized ROUGE-N matrix over tokenized captions.
///
/// Entry `[i][j]` treats caption j as the candidate and caption i as the
/// reference; the diagonal is fixed at zero.
pub fn pairwise_matrix(
    captions: &[TokenSequence],
    n: usize,
    norm: Normalizer,
) -> Result<Vec<Vec<f64>>> {
    if captions.is_empty() {
        return Err(Error::InvalidArgument("pairwise matrix needs at least one caption"));
    }
    let size = captions.len();
    let mut matrix = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in 0..size {
            if i != j {
                matrix[i][j] = rouge_n_normalized(&captions[j], &captions[i], n, norm)?;
            }
        }
    }
    Ok(matrix)
}

/// Picks the candidate with the highest mean pairwise score.
///
/// `score_i = Σ_{j≠i} matrix[i][j] / N`. The divisor is the candidate count
/// N rather than the peer count N−1; both orderings agree on the argmax, and
/// N is kept so scores match the selection rule as originally written.
pub fn consensus_select(
    input: &FusionInput,
    n: usize,
    norm: Normalizer,
    tok: &TokenizerConfig,
) -> Result<FusionResult> {
    let tokenized: Vec<TokenSequence> = input
        .candidates()
        .iter()
        .map(|(_, caption)| tokenize(caption, tok))
        .collect();
    let score_matrix = pairwise_matrix(&tokenized, n, norm)?;
    let count = tokenized.len() as f64;
    let scores: Vec<f64> = score_matrix
        .iter()
        .map(|row| row.iter().sum::<f64>() / count)
        .collect();
    let mut chosen_index = 0;
    for (i, score) in scores.iter().enumerate() {
        if *score > scores[chosen_index] {
            chosen_index = i;
        }
    }
    Ok(FusionResult {
        chosen_index,
        chosen_text: input.candidates()[chosen_index].1.clone(),
        scores,
        score_matrix,
    })
}
