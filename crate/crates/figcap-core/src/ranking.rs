//! Contrastive candidate ranking: length-normalized sequence log-probability,
//! a pairwise margin (hinge) loss over metric-ranked candidates, token-mean
//! cross-entropy, and the weighted combination of the two losses.
//!
//! Log-probabilities are inputs supplied by an external generator; nothing
//! here trains a model. The losses are deterministic functions of those
//! numbers, so they can be checked against hand evaluation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::metrics::{rouge_n_normalized, Normalizer};
use crate::text::{tokenize, TokenSequence, TokenizerConfig};

/// One generated caption with per-token log-probabilities.
///
/// Construction enforces one log-probability per token, each finite and ≤ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    text: String,
    tokens: TokenSequence,
    token_logprobs: Vec<f64>,
}

impl ScoredCandidate {
    pub fn new(
        text: impl Into<String>,
        token_logprobs: Vec<f64>,
        config: &TokenizerConfig,
    ) -> Result<Self> {
        let text = text.into();
        let tokens = tokenize(&text, config);
        if token_logprobs.len() != tokens.len() {
            return Err(Error::InvalidArgument(
                "candidate needs exactly one log-probability per token",
            ));
        }
        if !token_logprobs.iter().all(|lp| lp.is_finite() && *lp <= 0.0) {
            return Err(Error::InvalidArgument(
                "token log-probabilities must be finite and <= 0",
            ));
        }
        Ok(Self { text, tokens, token_logprobs })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> &TokenSequence {
        &self.tokens
    }

    pub fn token_logprobs(&self) -> &[f64] {
        &self.token_logprobs
    }
}

/// A reference caption and the candidates competing to describe it.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    reference: TokenSequence,
    candidates: Vec<ScoredCandidate>,
}

impl CandidateSet {
    /// At least one candidate is required.
    pub fn new(reference: TokenSequence, candidates: Vec<ScoredCandidate>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidArgument("candidate set must be nonempty"));
        }
        Ok(Self { reference, candidates })
    }

    pub fn reference(&self) -> &TokenSequence {
        &self.reference
    }

    pub fn candidates(&self) -> &[ScoredCandidate] {
        &self.candidates
    }
}

/// Hyperparameters of the combined loss.
///
/// `alpha` is the length-penalty exponent, `lambda` the per-rank-step margin,
/// `gamma` the weight of the contrastive term, and `norm` the normalizer used
/// when ordering candidates by metric. All three numbers must be finite and
/// nonnegative. The `lambda`/`gamma` defaults follow common reranker practice
/// and carry no special authority; override them freely.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LossConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub norm: Normalizer,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self { alpha: 1.0, lambda: 0.001, gamma: 100.0, norm: Normalizer::default() }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if ok(self.alpha) && ok(self.lambda) && ok(self.gamma) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "alpha, lambda, and gamma must be finite and nonnegative",
            ))
        }
    }
}

/// All loss components for one candidate set.
///
/// `f_values[i]` is the length-normalized log-probability of `candidates[i]`
/// in input order; `rank_order` lists candidate indices best-first as used by
/// the contrastive term, so the ranked scores are `f_values[rank_order[k]]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LossBreakdown {
    pub l_mul: f64,
    pub l_xent: f64,
    pub l_ctr: f64,
    pub f_values: Vec<f64>,
    pub rank_order: Vec<usize>,
}

/// Length-normalized sequence log-probability: `Σ logprobs / |tokens|^alpha`.
///
/// Always ≤ 0. Empty candidates and invalid `alpha` are rejected.
pub fn length_norm_logprob(candidate: &ScoredCandidate, alpha: f64) -> Result<f64> {
    if candidate.tokens().is_empty() {
        return Err(Error::InvalidArgument(
            "length normalization needs at least one token",
        ));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidArgument("alpha must be finite and nonnegative"));
    }
    let sum: f64 = candidate.token_logprobs().iter().sum();
    Ok(sum / math::powf(candidate.tokens().len() as f64, alpha))
}

/// Candidate indices sorted best-first by normalized ROUGE-N against the
/// set's reference. The sort is stable: ties keep input order.
pub fn metric_rank_order(
    set: &CandidateSet,
    n: usize,
    norm: Normalizer,
) -> Result<Vec<usize>> {
    let scores: Vec<f64> = set
        .candidates()
        .iter()
        .map(|c| rouge_n_normalized(c.tokens(), set.reference(), n, norm))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    Ok(order)
}

/// The set with candidates reordered best-first by normalized ROUGE-N.
pub fn order_by_metric(set: CandidateSet, n: usize, norm: Normalizer) -> Result<CandidateSet> {
    let order = metric_rank_order(&set, n, norm)?;
    let mut slots: Vec<Option<ScoredCandidate>> = set.candidates.into_iter().map(Some).collect();
    let candidates = order
        .into_iter()
        .map(|i| slots[i].take().expect("rank order is a permutation"))
        .collect();
    Ok(CandidateSet { reference: set.reference, candidates })
}

fn check_f_values(f_values: &[f64], lambda: f64) -> Result<()> {
    if f_values.is_empty() {
        return Err(Error::InvalidArgument("f-value list must be nonempty"));
    }
    if !f_values.iter().all(|f| f.is_finite()) {
        return Err(Error::InvalidArgument("f-values must be finite"));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidArgument("lambda must be finite and nonnegative"));
    }
    Ok(())
}

/// Pairwise margin loss over rank-ordered scores (best first):
/// `Σ_{i<j} max(0, f[j] - f[i] + (j-i)·lambda)`.
///
/// Depends only on differences of f-values, so it is shift-invariant.
pub fn contrastive_loss(f_values: &[f64], lambda: f64) -> Result<f64> {
    check_f_values(f_values, lambda)?;
    let mut total = 0.0;
    for i in 0..f_values.len() {
        for j in i + 1..f_values.len() {
            let margin = (j - i) as f64 * lambda;
            let arg = f_values[j] - f_values[i] + margin;
            if arg > 0.0 {
                total += arg;
            }
        }
    }
    Ok(total)
}

/// Subgradient of [`contrastive_loss`] with respect to each f-value.
///
/// A pair contributes only when its hinge argument is strictly positive;
/// arguments exactly at the kink are treated as inactive.
pub fn contrastive_loss_gradient(f_values: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_f_values(f_values, lambda)?;
    let mut grad = vec![0.0; f_values.len()];
    for i in 0..f_values.len() {
        for j in i + 1..f_values.len() {
            let margin = (j - i) as f64 * lambda;
            if f_values[j] - f_values[i] + margin > 0.0 {
                grad[j] += 1.0;
                grad[i] -= 1.0;
            }
        }
    }
    Ok(grad)
}

/// Token-mean negative log-likelihood of the reference.
pub fn cross_entropy(reference_logprobs: &[f64]) -> Result<f64> {
    if reference_logprobs.is_empty() {
        return Err(Error::InvalidArgument(
            "cross-entropy needs at least one log-probability",
        ));
    }
    if !reference_logprobs.iter().all(|lp| lp.is_finite() && *lp <= 0.0) {
        return Err(Error::InvalidArgument(
            "reference log-probabilities must be finite and <= 0",
        ));
    }
    let sum: f64 = reference_logprobs.iter().sum();
    Ok(-sum / reference_logprobs.len() as f64)
}

/// Full loss evaluation for one candidate set.
///
/// Candidates are ranked by normalized ROUGE-2 against the reference, the
/// contrastive term is evaluated over their f-values in that order, and the
/// combined loss is `l_xent + gamma * l_ctr`.
pub fn loss_breakdown(
    set: &CandidateSet,
    reference_logprobs: &[f64],
    config: &LossConfig,
) -> Result<LossBreakdown> {
    config.validate()?;
    let rank_order = metric_rank_order(set, 2, config.norm)?;
    let f_values: Vec<f64> = set
        .candidates()
        .iter()
        .map(|c| length_norm_logprob(c, config.alpha))
        .collect::<Result<_>>()?;
    let ranked: Vec<f64> = rank_order.iter().map(|&i| f_values[i]).collect();
    let l_ctr = contrastive_loss(&ranked, config.lambda)?;
    let l_xent = cross_entropy(reference_logprobs)?;
    let l_mul = l_xent + config.gamma * l_ctr;
    Ok(LossBreakdown { l_mul, l_xent, l_ctr, f_values, rank_order })
}

/// The three loss components `(l_mul, l_xent, l_ctr)`.
pub fn multitask_loss(
    set: &CandidateSet,
    reference_logprobs: &[f64],
    config: &LossConfig,
) -> Result<(f64, f64, f64)> {
    let b = loss_breakdown(set, reference_logprobs, config)?;
    Ok((b.l_mul, b.l_xent, b.l_ctr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    const TOL: f64 = 1e-12;

    fn cand(text: &str, logprobs: Vec<f64>) -> ScoredCandidate {
        ScoredCandidate::new(text, logprobs, &TokenizerConfig::default()).unwrap()
    }

    fn seq(text: &str) -> TokenSequence {
        tokenize(text, &TokenizerConfig::default())
    }

    #[test]
    fn candidate_validation_rejects_bad_inputs() {
        let cfg = TokenizerConfig::default();
        assert!(ScoredCandidate::new("a b", vec![-1.0], &cfg).is_err());
        assert!(ScoredCandidate::new("a b", vec![-1.0, 0.5], &cfg).is_err());
        assert!(ScoredCandidate::new("a b", vec![-1.0, f64::NAN], &cfg).is_err());
        assert!(ScoredCandidate::new("a b", vec![-1.0, f64::NEG_INFINITY], &cfg).is_err());
        assert!(ScoredCandidate::new("a b", vec![-1.0, 0.0], &cfg).is_ok());
    }

    #[test]
    fn empty_candidate_set_rejected() {
        assert!(CandidateSet::new(seq("ref"), vec![]).is_err());
    }

    #[test]
    fn length_norm_hand_values() {
        let c = cand("a b", vec![-0.5, -1.5]);
        assert!((length_norm_logprob(&c, 1.0).unwrap() - -1.0).abs() < TOL);
        assert!((length_norm_logprob(&c, 0.0).unwrap() - -2.0).abs() < TOL);
        let single = cand("a", vec![-1.0]);
        for alpha in [0.0, 1.0, 2.5] {
            assert!((length_norm_logprob(&single, alpha).unwrap() - -1.0).abs() < TOL);
        }
    }

    #[test]
    fn length_norm_rejects_empty_and_bad_alpha() {
        let empty = cand("", vec![]);
        assert!(length_norm_logprob(&empty, 1.0).is_err());
        let c = cand("a", vec![-1.0]);
        assert!(length_norm_logprob(&c, -1.0).is_err());
        assert!(length_norm_logprob(&c, f64::NAN).is_err());
    }

    #[test]
    fn ordering_sorts_descending() {
        let reference = seq("w x y z");
        let set = CandidateSet::new(
            reference,
            vec![
                cand("w q q q", vec![-1.0; 4]),   // 0 shared bigrams
                cand("w x y z", vec![-1.0; 4]),   // exact match
                cand("w x q q", vec![-1.0; 4]),   // 1 shared bigram
            ],
        )
        .unwrap();
        let order = metric_rank_order(&set, 2, Normalizer::Identity).unwrap();
        assert_eq!(order, vec![1, 2, 0]);
        let ordered = order_by_metric(set, 2, Normalizer::Identity).unwrap();
        assert_eq!(ordered.candidates()[0].text(), "w x y z");
        assert_eq!(ordered.candidates()[2].text(), "w q q q");
    }

    #[test]
    fn ordering_is_stable_under_ties() {
        let set = CandidateSet::new(
            seq("w x y"),
            vec![
                cand("p p", vec![-1.0; 2]),
                cand("q q", vec![-2.0; 2]),
                cand("w x y", vec![-3.0; 3]),
            ],
        )
        .unwrap();
        // The two disjoint candidates tie at 0 and keep input order.
        let order = metric_rank_order(&set, 2, Normalizer::Identity).unwrap();
        assert_eq!(order, vec![2, 0, 1]);
    }

    #[test]
    fn contrastive_single_candidate_is_zero() {
        assert_eq!(contrastive_loss(&[-0.3], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn contrastive_hand_values() {
        // Well-separated pair: hinge never activates.
        assert_eq!(contrastive_loss(&[0.0, -2.0], 1.0).unwrap(), 0.0);
        // Three equal scores: pairs contribute 0.5, 0.5, and 1.0.
        let v = contrastive_loss(&[-1.0, -1.0, -1.0], 0.5).unwrap();
        assert!((v - 2.0).abs() < TOL);
    }

    #[test]
    fn contrastive_rejects_bad_inputs() {
        assert!(contrastive_loss(&[], 1.0).is_err());
        assert!(contrastive_loss(&[f64::NAN], 1.0).is_err());
        assert!(contrastive_loss(&[-1.0], -0.1).is_err());
    }

    #[test]
    fn contrastive_shift_invariance() {
        let f = [-0.2, -0.9, -0.4, -1.3];
        let base = contrastive_loss(&f, 0.25).unwrap();
        for c in [-5.0, 0.7, 12.0] {
            let shifted: Vec<f64> = f.iter().map(|v| v + c).collect();
            assert!((contrastive_loss(&shifted, 0.25).unwrap() - base).abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_zero_on_separated_scores() {
        let g = contrastive_loss_gradient(&[0.0, -10.0, -20.0], 0.5).unwrap();
        assert_eq!(g, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn gradient_hand_value_for_one_active_pair() {
        let g = contrastive_loss_gradient(&[-1.0, -1.0], 0.5).unwrap();
        assert_eq!(g, vec![-1.0, 1.0]);
    }

    #[test]
    fn gradient_treats_kink_as_inactive() {
        // Hinge argument is exactly 0: -0.5 - 0.0 + 0.5.
        let g = contrastive_loss_gradient(&[0.0, -0.5], 0.5).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = [-0.1, -0.35, -0.8, -0.55];
        let lambda = 0.17;
        let grad = contrastive_loss_gradient(&f, lambda).unwrap();
        let step = 1e-6;
        for k in 0..f.len() {
            let mut hi = f.to_vec();
            let mut lo = f.to_vec();
            hi[k] += step;
            lo[k] -= step;
            let numeric = (contrastive_loss(&hi, lambda).unwrap()
                - contrastive_loss(&lo, lambda).unwrap())
                / (2.0 * step);
            assert!((grad[k] - numeric).abs() < 1e-4, "component {k}");
        }
    }

    #[test]
    fn cross_entropy_hand_values() {
        assert!((cross_entropy(&[-1.0, -1.0]).unwrap() - 1.0).abs() < TOL);
        assert_eq!(cross_entropy(&[0.0, 0.0]).unwrap(), 0.0);
        assert!((cross_entropy(&[-2.0]).unwrap() - 2.0).abs() < TOL);
    }

    #[test]
    fn cross_entropy_rejects_bad_inputs() {
        assert!(cross_entropy(&[]).is_err());
        assert!(cross_entropy(&[0.1]).is_err());
        assert!(cross_entropy(&[f64::NAN]).is_err());
    }

    #[test]
    fn gamma_zero_disables_contrastive_term() {
        let set = CandidateSet::new(
            seq("a b c"),
            vec![cand("a b", vec![-0.5, -0.5]), cand("c d", vec![-0.1, -0.1])],
        )
        .unwrap();
        let config = LossConfig { gamma: 0.0, ..LossConfig::default() };
        let (l_mul, l_xent, _) = multitask_loss(&set, &[-1.0, -2.0, -3.0], &config).unwrap();
        assert_eq!(l_mul, l_xent);
    }

    #[test]
    fn single_candidate_has_zero_contrastive_loss() {
        let set = CandidateSet::new(seq("a b"), vec![cand("a b", vec![-0.5, -0.5])]).unwrap();
        let (l_mul, l_xent, l_ctr) =
            multitask_loss(&set, &[-1.0, -1.0], &LossConfig::default()).unwrap();
        assert_eq!(l_ctr, 0.0);
        assert_eq!(l_mul, l_xent);
    }

    #[test]
    fn three_candidate_set_matches_independent_oracle() {
        // Frozen from a direct-evaluation script run before this module was
        // written: rank by normalized ROUGE-2, f = sum/len^alpha, hinge sum.
        let reference = seq("the model improves accuracy on the benchmark");
        let reference_logprobs = [-0.5, -0.2, -0.9, -0.3, -0.1, -0.4, -0.6];
        let set = CandidateSet::new(
            reference,
            vec![
                cand("the model improves accuracy", vec![-0.2, -0.4, -0.6, -0.8]),
                cand("the model hurts speed", vec![-0.1, -0.3, -0.5, -0.7]),
                cand("results are inconclusive here today", vec![-1.0, -1.1, -1.2, -1.3, -1.4]),
            ],
        )
        .unwrap();
        let config = LossConfig {
            alpha: 1.0,
            lambda: 0.3,
            gamma: 2.0,
            norm: Normalizer::LengthRatio,
        };
        let b = loss_breakdown(&set, &reference_logprobs, &config).unwrap();
        assert_eq!(b.rank_order, vec![0, 1, 2]);
        let expected_f = [-0.5, -0.4, -1.2];
        for (got, want) in b.f_values.iter().zip(expected_f) {
            assert!((got - want).abs() < TOL);
        }
        assert!((b.l_ctr - 0.399_999_999_999_999_97).abs() < TOL);
        assert!((b.l_xent - 0.428_571_428_571_428_55).abs() < TOL);
        assert!((b.l_mul - 1.228_571_428_571_428_4).abs() < TOL);
        let (l_mul, l_xent, l_ctr) = multitask_loss(&set, &reference_logprobs, &config).unwrap();
        assert_eq!((l_mul, l_xent, l_ctr), (b.l_mul, b.l_xent, b.l_ctr));
    }

    #[test]
    fn loss_config_validation() {
        assert!(LossConfig::default().validate().is_ok());
        let bad = LossConfig { lambda: -0.1, ..LossConfig::default() };
        assert!(bad.validate().is_err());
        let nan = LossConfig { gamma: f64::NAN, ..LossConfig::default() };
        assert!(nan.validate().is_err());
    }

    #[test]
    fn candidate_accessors_expose_inputs() {
        let c = cand("The Model", vec![-0.5, -0.25]);
        assert_eq!(c.text(), "The Model");
        assert_eq!(c.tokens().tokens, ["the", "model"]);
        assert_eq!(c.token_logprobs(), [-0.5, -0.25]);
        assert_eq!(c.text().to_string(), "The Model");
    }
}
