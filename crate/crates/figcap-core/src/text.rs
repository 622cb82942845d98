//! Tokenization and n-gram extraction.
//!
//! Every metric in this crate counts overlaps between word tokens produced
//! here, so the rules are deliberately simple and total: lowercase, then
//! split on maximal runs of characters that are neither letters nor digits.
//! Unicode letters count as letters; scientific captions routinely contain
//! Greek symbols.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tokenizer knobs. The defaults (lowercase, digits kept) are what the
/// metrics and the CLI use unless told otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TokenizerConfig {
    /// Lowercase tokens while building them.
    pub lowercase: bool,
    /// Treat digits as token characters; when false they split tokens like
    /// punctuation does.
    pub keep_digits: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self { lowercase: true, keep_digits: true }
    }
}

impl TokenizerConfig {
    fn is_token_char(&self, ch: char) -> bool {
        if self.keep_digits {
            ch.is_alphanumeric()
        } else {
            ch.is_alphabetic()
        }
    }
}

/// A tokenized string, keeping the original text alongside the tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequence {
    /// Normalized word tokens, never empty strings.
    pub tokens: Vec<String>,
    /// The string the tokens were extracted from.
    pub source_text: String,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Joins the tokens with single spaces. `tokenize` is idempotent on this
    /// output.
    pub fn detokenize(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Splits `text` into normalized tokens. Total function: any input is fine,
/// the empty string yields an empty sequence.
///
/// ```
/// use figcap_core::text::{tokenize, TokenizerConfig};
///
/// let seq = tokenize("PP-OCRv3 30}", &TokenizerConfig::default());
/// assert_eq!(seq.tokens, ["pp", "ocrv3", "30"]);
/// ```
pub fn tokenize(text: &str, config: &TokenizerConfig) -> TokenSequence {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if config.is_token_char(ch) {
            if config.lowercase {
                // Lowercasing can expand to several chars (e.g. 'İ' gains a
                // combining mark); keep only the ones that are still token
                // characters so detokenize/tokenize stays a fixpoint.
                for lowered in ch.to_lowercase() {
                    if config.is_token_char(lowered) {
                        current.push(lowered);
                    }
                }
            } else {
                current.push(ch);
            }
        } else if !current.is_empty() {
            tokens.push(core::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    TokenSequence { tokens, source_text: String::from(text) }
}

/// Prefix of `text` that covers its first `count` tokens, cut right after
/// the last character of the final kept token.
pub(crate) fn token_prefix<'a>(text: &'a str, count: usize, config: &TokenizerConfig) -> &'a str {
    if count == 0 {
        return "";
    }
    let mut seen = 0usize;
    let mut in_token = false;
    let mut end = 0usize;
    for (idx, ch) in text.char_indices() {
        if config.is_token_char(ch) {
            if !in_token {
                in_token = true;
                seen += 1;
            }
            end = idx + ch.len_utf8();
        } else if in_token {
            in_token = false;
            if seen == count {
                return &text[..end];
            }
        }
    }
    if seen >= count {
        &text[..end]
    } else {
        text
    }
}

/// A multiset of n-grams with their occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramMultiset {
    order: usize,
    counts: BTreeMap<Vec<String>, usize>,
    total: usize,
}

impl NgramMultiset {
    /// The n in n-gram.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Sum of all counts: `max(0, tokens - n + 1)` for the source sequence.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Occurrence count of one n-gram, zero if absent.
    pub fn count(&self, gram: &[String]) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// Clipped overlap: for each distinct n-gram, the smaller of the two
    /// counts. This is the numerator shared by ROUGE precision and recall.
    pub fn overlap(&self, other: &NgramMultiset) -> usize {
        self.counts
            .iter()
            .map(|(gram, count)| (*count).min(other.count(gram)))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[String], usize)> {
        self.counts.iter().map(|(gram, count)| (gram.as_slice(), *count))
    }
}

/// Sliding-window n-grams of width `n`, stride 1. Sequences shorter than
/// `n` yield an empty multiset; `n == 0` is rejected.
pub fn ngrams(seq: &TokenSequence, n: usize) -> Result<NgramMultiset> {
    if n == 0 {
        return Err(Error::InvalidArgument("n-gram order must be at least 1"));
    }
    let mut counts: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    let mut total = 0usize;
    if seq.tokens.len() >= n {
        for window in seq.tokens.windows(n) {
            *counts.entry(window.to_vec()).or_insert(0) += 1;
            total += 1;
        }
    }
    Ok(NgramMultiset { order: n, counts, total })
}
