//! Caption quality metrics: ROUGE-N precision/recall/F1, normalized ROUGE
//! variants, sentence-level smoothed BLEU-4, and corpus averaging.
//!
//! ROUGE-N counts clipped n-gram overlap. BLEU-4 is the geometric mean of
//! modified 1..4-gram precisions with add-one smoothing (applied to orders
//! ≥ 2 whose raw match count is zero) and the usual brevity penalty; it is
//! computed per pair, not pooled over the corpus, so that corpus scores are
//! plain arithmetic means of per-pair scores.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::text::{ngrams, TokenSequence};

/// Precision, recall, and balanced F1 for one candidate/reference pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PairScore {
    /// Builds the score from precision and recall; F1 is 0 when both are 0.
    pub fn from_precision_recall(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self { precision, recall, f1 }
    }
}

/// Transform applied to ROUGE F1 to obtain the "normalized" variants.
///
/// The exact rescaling used by challenge scorers is unpublished, so it is a
/// configuration point. `LengthRatio` divides F1 by the candidate/reference
/// token-length ratio (candidate length floored at one token), rewarding
/// captions that say as much with fewer words; `Identity` leaves F1 alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Normalizer {
    Identity,
    #[default]
    LengthRatio,
}

impl core::str::FromStr for Normalizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Normalizer::Identity),
            "length-ratio" => Ok(Normalizer::LengthRatio),
            _ => Err(Error::InvalidArgument("normalizer must be `identity` or `length-ratio`")),
        }
    }
}

impl core::fmt::Display for Normalizer {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Normalizer::Identity => f.write_str("identity"),
            Normalizer::LengthRatio => f.write_str("length-ratio"),
        }
    }
}

/// The five reported metrics for one pair or a whole corpus.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricReport {
    pub bleu4: f64,
    pub rouge1_f1: f64,
    pub rouge2_f1: f64,
    pub rouge1_norm: f64,
    pub rouge2_norm: f64,
}

/// ROUGE-N over clipped n-gram counts.
///
/// Precision divides the overlap by the candidate's n-gram count, recall by
/// the reference's; an empty count on either side zeroes that component.
pub fn rouge_n(candidate: &TokenSequence, reference: &TokenSequence, n: usize) -> Result<PairScore> {
    let cand = ngrams(candidate, n)?;
    let refr = ngrams(reference, n)?;
    let overlap = cand.overlap(&refr) as f64;
    let precision = if cand.total() == 0 { 0.0 } else { overlap / cand.total() as f64 };
    let recall = if refr.total() == 0 { 0.0 } else { overlap / refr.total() as f64 };
    Ok(PairScore::from_precision_recall(precision, recall))
}

/// ROUGE-N F1 passed through a [`Normalizer`].
///
/// Under `LengthRatio` the result is `f1 / (|candidate| / |reference|)` with
/// the candidate length floored at one token; an empty reference makes the
/// ratio undefined and is an error.
pub fn rouge_n_normalized(
    candidate: &TokenSequence,
    reference: &TokenSequence,
    n: usize,
    norm: Normalizer,
) -> Result<f64> {
    let f1 = rouge_n(candidate, reference, n)?.f1;
    match norm {
        Normalizer::Identity => Ok(f1),
        Normalizer::LengthRatio => {
            if reference.is_empty() {
                return Err(Error::UndefinedNormalization);
            }
            let ratio = candidate.len().max(1) as f64 / reference.len() as f64;
            Ok(f1 / ratio)
        }
    }
}

/// Sentence-level BLEU-4 with add-one smoothing and brevity penalty.
///
/// Total function: an empty candidate scores 0.
pub fn bleu4(candidate: &TokenSequence, reference: &TokenSequence) -> f64 {
    if candidate.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=4 {
        let cand = ngrams(candidate, n).expect("order >= 1");
        let refr = ngrams(reference, n).expect("order >= 1");
        let mut matches = cand.overlap(&refr) as f64;
        let mut attempts = cand.total() as f64;
        if n >= 2 && matches == 0.0 {
            matches += 1.0;
            attempts += 1.0;
        }
        if matches == 0.0 {
            // Only reachable for unigrams: no overlap at all.
            return 0.0;
        }
        log_sum += math::ln(matches / attempts);
    }
    let geometric_mean = math::exp(log_sum / 4.0);
    let brevity_penalty = if candidate.len() < reference.len() {
        math::exp(1.0 - reference.len() as f64 / candidate.len() as f64)
    } else {
        1.0
    };
    brevity_penalty * geometric_mean
}

/// All five metrics for one candidate/reference pair.
pub fn pair_report(
    candidate: &TokenSequence,
    reference: &TokenSequence,
    norm: Normalizer,
) -> Result<MetricReport> {
    Ok(MetricReport {
        bleu4: bleu4(candidate, reference),
        rouge1_f1: rouge_n(candidate, reference, 1)?.f1,
        rouge2_f1: rouge_n(candidate, reference, 2)?.f1,
        rouge1_norm: rouge_n_normalized(candidate, reference, 1, norm)?,
        rouge2_norm: rouge_n_normalized(candidate, reference, 2, norm)?,
    })
}

/// Arithmetic mean of per-pair reports, reduced strictly left to right so a
/// given input order always produces bit-identical output.
pub fn mean_report(reports: &[MetricReport]) -> Result<MetricReport> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument("cannot average an empty report list"));
    }
    let mut sum = MetricReport::default();
    for r in reports {
        sum.bleu4 += r.bleu4;
        sum.rouge1_f1 += r.rouge1_f1;
        sum.rouge2_f1 += r.rouge2_f1;
        sum.rouge1_norm += r.rouge1_norm;
        sum.rouge2_norm += r.rouge2_norm;
    }
    let n = reports.len() as f64;
    Ok(MetricReport {
        bleu4: sum.bleu4 / n,
        rouge1_f1: sum.rouge1_f1 / n,
        rouge2_f1: sum.rouge2_f1 / n,
        rouge1_norm: sum.rouge1_norm / n,
        rouge2_norm: sum.rouge2_norm / n,
    })
}

/// Per-pair metrics averaged over a corpus of (candidate, reference) pairs.
pub fn evaluate_corpus(
    pairs: &[(TokenSequence, TokenSequence)],
    norm: Normalizer,
) -> Result<MetricReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("cannot evaluate an empty corpus"));
    }
    let reports: Vec<MetricReport> = pairs
        .iter()
        .map(|(candidate, reference)| pair_report(candidate, reference, norm))
        .collect::<Result<_>>()?;
    mean_report(&reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{tokenize, TokenizerConfig};
    use alloc::vec;

    fn seq(text: &str) -> TokenSequence {
        tokenize(text, &TokenizerConfig::default())
    }

    const TOL: f64 = 1e-12;

    #[test]
    fn identical_texts_score_one() {
        let s = rouge_n(&seq("the cat sat"), &seq("the cat sat"), 2).unwrap();
        assert!((s.precision - 1.0).abs() < TOL);
        assert!((s.recall - 1.0).abs() < TOL);
        assert!((s.f1 - 1.0).abs() < TOL);
    }

    #[test]
    fn rouge2_hand_counted_pair() {
        // candidate bigrams: 5, reference bigrams: 2, clipped overlap: 2.
        let s = rouge_n(&seq("the cat sat on the mat"), &seq("the cat sat"), 2).unwrap();
        assert!((s.precision - 2.0 / 5.0).abs() < TOL);
        assert!((s.recall - 1.0).abs() < TOL);
        assert!((s.f1 - 4.0 / 7.0).abs() < TOL);
    }

    #[test]
    fn disjoint_vocabularies_score_zero() {
        let s = rouge_n(&seq("x y"), &seq("a b"), 1).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn zero_order_rejected() {
        assert!(rouge_n(&seq("a"), &seq("a"), 0).is_err());
    }

    #[test]
    fn identity_normalizer_returns_f1_unchanged() {
        let cand = seq("the cat sat on the mat");
        let refr = seq("the cat sat");
        let f1 = rouge_n(&cand, &refr, 2).unwrap().f1;
        let norm = rouge_n_normalized(&cand, &refr, 2, Normalizer::Identity).unwrap();
        assert_eq!(f1, norm);
    }

    #[test]
    fn length_ratio_hand_computed_pair() {
        // F1 = 4/7, ratio = 3/6 = 0.5, so 8/7.
        let v = rouge_n_normalized(
            &seq("the cat sat"),
            &seq("the cat sat on the mat"),
            2,
            Normalizer::LengthRatio,
        )
        .unwrap();
        assert!((v - 8.0 / 7.0).abs() < TOL);
    }

    #[test]
    fn length_ratio_identity_case() {
        let v = rouge_n_normalized(&seq("a b c"), &seq("a b c"), 2, Normalizer::LengthRatio)
            .unwrap();
        assert!((v - 1.0).abs() < TOL);
    }

    #[test]
    fn length_ratio_rejects_empty_reference() {
        let err = rouge_n_normalized(&seq("a"), &seq(""), 1, Normalizer::LengthRatio);
        assert_eq!(err, Err(Error::UndefinedNormalization));
    }

    #[test]
    fn length_ratio_floors_empty_candidate() {
        let v = rouge_n_normalized(&seq(""), &seq("a b"), 1, Normalizer::LengthRatio).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn bleu_perfect_match_is_one() {
        let s = seq("the cat sat on the mat");
        assert!((bleu4(&s, &s) - 1.0).abs() < TOL);
    }

    #[test]
    fn bleu_empty_candidate_is_zero() {
        assert_eq!(bleu4(&seq(""), &seq("a b c")), 0.0);
    }

    #[test]
    fn bleu_matches_independent_oracle_value() {
        // Frozen from an independent smoothed-BLEU script run before the
        // build: all four precisions are 1, brevity penalty exp(1 - 6/4).
        let v = bleu4(&seq("the cat sat on"), &seq("the cat sat on the mat"));
        assert!((v - 0.606_530_659_712_633_4).abs() < 1e-9);
    }

    #[test]
    fn bleu_disjoint_is_zero() {
        assert_eq!(bleu4(&seq("x y z w"), &seq("a b c d")), 0.0);
    }

    #[test]
    fn corpus_of_identical_pairs_is_all_ones() {
        let pairs = vec![
            (seq("a b c d"), seq("a b c d")),
            (seq("e f g h"), seq("e f g h")),
        ];
        let report = evaluate_corpus(&pairs, Normalizer::Identity).unwrap();
        for v in [
            report.bleu4,
            report.rouge1_f1,
            report.rouge2_f1,
            report.rouge1_norm,
            report.rouge2_norm,
        ] {
            assert!((v - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn corpus_of_one_pair_equals_that_pair() {
        let pairs = vec![(seq("the cat sat on"), seq("the cat sat on the mat"))];
        let report = evaluate_corpus(&pairs, Normalizer::LengthRatio).unwrap();
        let single = pair_report(&pairs[0].0, &pairs[0].1, Normalizer::LengthRatio).unwrap();
        assert_eq!(report, single);
    }

    #[test]
    fn corpus_mean_is_elementwise() {
        let a = (seq("the cat sat on the mat"), seq("the cat sat"));
        let b = (seq("x y"), seq("a b"));
        let ra = pair_report(&a.0, &a.1, Normalizer::Identity).unwrap();
        let rb = pair_report(&b.0, &b.1, Normalizer::Identity).unwrap();
        let mean = evaluate_corpus(&[a, b], Normalizer::Identity).unwrap();
        assert!((mean.rouge2_f1 - (ra.rouge2_f1 + rb.rouge2_f1) / 2.0).abs() < TOL);
        assert!((mean.bleu4 - (ra.bleu4 + rb.bleu4) / 2.0).abs() < TOL);
        assert!((mean.rouge1_norm - (ra.rouge1_norm + rb.rouge1_norm) / 2.0).abs() < TOL);
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(evaluate_corpus(&[], Normalizer::Identity).is_err());
        assert!(mean_report(&[]).is_err());
    }

    #[test]
    fn normalizer_round_trips_through_strings() {
        for norm in [Normalizer::Identity, Normalizer::LengthRatio] {
            let shown = alloc::format!("{norm}");
            assert_eq!(shown.parse::<Normalizer>().unwrap(), norm);
        }
        assert!("rouge".parse::<Normalizer>().is_err());
    }
}
