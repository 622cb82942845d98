//! Mention-driven paragraph refinement and model-input assembly.
//!
//! A figure record carries OCR strings, mention sentences, and the enclosing
//! paragraph. Refinement finds which figure or table the mentions talk about
//! most, keeps the paragraph sentences that reference it, and bounds the
//! result by a character budget. Assembly concatenates the OCR, mention, and
//! paragraph sections behind fixed markers under a token budget.
//!
//! Everything here is deterministic string processing; the optional external
//! rewriting service lives elsewhere and falls back to these functions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::text::{token_prefix, tokenize, TokenizerConfig};

/// One figure's worth of source material, as stored in a corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FigureRecord {
    pub id: String,
    /// Gold caption; absent for unlabeled splits.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub caption: Option<String>,
    /// OCR strings from the official extraction.
    pub ocr: Vec<String>,
    /// OCR strings from a re-extraction pass, when available.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub ocr_alt: Option<Vec<String>>,
    pub mentions: Vec<String>,
    pub paragraph: String,
}

/// Whether a reference points at a figure or a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum RefKind {
    Figure,
    Table,
}

impl core::fmt::Display for RefKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RefKind::Figure => f.write_str("figure"),
            RefKind::Table => f.write_str("table"),
        }
    }
}

/// A numbered figure or table reference, e.g. "Fig. 3".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FigureRef {
    pub kind: RefKind,
    /// Always ≥ 1; the scanner never produces 0.
    pub number: u32,
}

impl core::fmt::Display for FigureRef {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} {}", self.kind, self.number)
    }
}

/// How a refined paragraph was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Provenance {
    RuleBased,
    ExternalLlm,
    Passthrough,
}

/// A refined paragraph together with how it was obtained.
///
/// `target` is absent exactly when no figure reference could be resolved and
/// the paragraph passed through unrefined; only passthrough output may
/// exceed the character budget.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RefinementResult {
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub target: Option<FigureRef>,
    pub refined_paragraph: String,
    pub provenance: Provenance,
    /// Character (not byte) count of `refined_paragraph`.
    pub char_count: usize,
}

impl RefinementResult {
    pub fn new(target: Option<FigureRef>, refined_paragraph: String, provenance: Provenance) -> Self {
        let char_count = refined_paragraph.chars().count();
        Self { target, refined_paragraph, provenance, char_count }
    }
}

/// Whether a dot may sit between the keyword and the number.
#[derive(Clone, Copy)]
enum DotRule {
    Forbidden,
    Optional,
    Required,
}

const REF_KEYWORDS: [(&str, RefKind, DotRule); 4] = [
    ("figure", RefKind::Figure, DotRule::Forbidden),
    ("table", RefKind::Table, DotRule::Forbidden),
    ("fig", RefKind::Figure, DotRule::Optional),
    ("tab", RefKind::Table, DotRule::Required),
];

/// Scans text for figure/table references in source order.
///
/// Recognized shapes, case-insensitively: `Figure N`, `Fig. N`, `Fig N`,
/// `Table N`, `Tab. N`. The keyword must start at a word boundary;
/// whitespace must separate keyword and number except after an
/// abbreviating dot, where it may be omitted (`Fig.3`). Bare `tab` without
/// its dot is not treated as a reference, so prose like "the tab 3 key"
/// stays unmatched. `N` is a run of ASCII digits parsed as a positive
/// 32-bit integer; zero and overflowing runs are ignored.
pub fn find_figure_refs(text: &str) -> Vec<FigureRef> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut ci = 0;
    while ci < chars.len() {
        let at_boundary = ci == 0 || !chars[ci - 1].1.is_alphanumeric();
        if at_boundary {
            if let Some((consumed, found)) = match_ref_at(text, &chars, ci) {
                out.push(found);
                ci += consumed;
                continue;
            }
        }
        ci += 1;
    }
    out
}

fn match_ref_at(text: &str, chars: &[(usize, char)], start: usize) -> Option<(usize, FigureRef)> {
    let bytes = text.as_bytes();
    let byte_start = chars[start].0;
    for (keyword, kind, dot_rule) in REF_KEYWORDS {
        let byte_end = byte_start + keyword.len();
        if byte_end > bytes.len()
            || !bytes[byte_start..byte_end].eq_ignore_ascii_case(keyword.as_bytes())
        {
            continue;
        }
        // The keyword bytes are ASCII, so they span exactly len() chars.
        let mut ci = start + keyword.len();
        let mut saw_dot = false;
        if !matches!(dot_rule, DotRule::Forbidden) && ci < chars.len() && chars[ci].1 == '.' {
            saw_dot = true;
            ci += 1;
        }
        if matches!(dot_rule, DotRule::Required) && !saw_dot {
            continue;
        }
        let mut whitespace = 0;
        while ci < chars.len() && chars[ci].1.is_whitespace() {
            whitespace += 1;
            ci += 1;
        }
        if whitespace == 0 && !saw_dot {
            continue;
        }
        let digits_start = ci;
        while ci < chars.len() && chars[ci].1.is_ascii_digit() {
            ci += 1;
        }
        if ci == digits_start {
            continue;
        }
        let lo = chars[digits_start].0;
        let hi = if ci < chars.len() { chars[ci].0 } else { bytes.len() };
        match text[lo..hi].parse::<u32>() {
            Ok(number) if number >= 1 => {
                return Some((ci - start, FigureRef { kind, number }));
            }
            _ => continue,
        }
    }
    None
}

/// The reference mentioned most often across all mention strings.
///
/// Counts every occurrence in every mention; ties break to the reference
/// whose first occurrence comes earliest in scan order. No reference in any
/// mention is an error, which batch callers treat as "pass the paragraph
/// through unrefined".
pub fn most_mentioned_figure<S: AsRef<str>>(mentions: &[S]) -> Result<FigureRef> {
    let mut stats: BTreeMap<FigureRef, (usize, usize)> = BTreeMap::new();
    let mut occurrence = 0usize;
    for mention in mentions {
        for found in find_figure_refs(mention.as_ref()) {
            let entry = stats.entry(found).or_insert((0, occurrence));
            entry.0 += 1;
            occurrence += 1;
        }
    }
    let mut best: Option<(FigureRef, usize, usize)> = None;
    for (found, (count, first)) in stats {
        let better = match best {
            None => true,
            Some((_, best_count, best_first)) => {
                count > best_count || (count == best_count && first < best_first)
            }
        };
        if better {
            best = Some((found, count, first));
        }
    }
    best.map(|(found, _, _)| found).ok_or(Error::NoReference)
}

/// Words whose trailing dot does not end a sentence.
const ABBREVIATIONS: [&str; 17] = [
    "al", "cf", "e", "eq", "eqs", "fig", "figs", "g", "i", "no", "nos", "ref",
    "resp", "sec", "tab", "tabs", "vs",
];

/// Splits text into sentences on `.`, `!`, or `?` followed by whitespace or
/// end of input. A `.` directly after a known abbreviation (`Fig.`, `e.g.`,
/// `et al.`, ...) does not split. Returned slices keep their terminator and
/// interior whitespace; surrounding whitespace is trimmed.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut i = 0;
    while i < chars.len() {
        let (byte_idx, ch) = chars[i];
        if start.is_none() {
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            start = Some(byte_idx);
        }
        if matches!(ch, '.' | '!' | '?') {
            let at_end = i + 1 == chars.len();
            let before_space = !at_end && chars[i + 1].1.is_whitespace();
            let abbreviated = ch == '.' && ends_with_abbreviation(text, &chars, i);
            if (at_end || before_space) && !abbreviated {
                let end = byte_idx + ch.len_utf8();
                out.push(&text[start.unwrap()..end]);
                start = None;
            }
        }
        i += 1;
    }
    if let Some(s) = start {
        let tail = text[s..].trim_end();
        if !tail.is_empty() {
            out.push(tail);
        }
    }
    out
}

fn ends_with_abbreviation(text: &str, chars: &[(usize, char)], dot_idx: usize) -> bool {
    let mut word_start = dot_idx;
    while word_start > 0 && chars[word_start - 1].1.is_alphabetic() {
        word_start -= 1;
    }
    if word_start == dot_idx {
        return false;
    }
    let word = &text[chars[word_start].0..chars[dot_idx].0];
    ABBREVIATIONS.iter().any(|a| word.eq_ignore_ascii_case(a))
}

/// Keeps the paragraph sentences that reference `target`, in order; if none
/// does, keeps leading sentences instead. The output is greedily grown one
/// sentence at a time (joined by single spaces) while it fits the character
/// budget, so it is always a subsequence of the input's sentences.
pub fn refine_rule_based(
    paragraph: &str,
    target: FigureRef,
    budget: usize,
) -> Result<RefinementResult> {
    if budget == 0 {
        return Err(Error::InvalidArgument("refinement budget must be positive"));
    }
    let sentences = split_sentences(paragraph);
    let matching: Vec<&str> = sentences
        .iter()
        .copied()
        .filter(|s| find_figure_refs(s).contains(&target))
        .collect();
    let kept = if matching.is_empty() { sentences } else { matching };
    let mut refined = String::new();
    let mut used = 0usize;
    for sentence in kept {
        let chars = sentence.chars().count();
        let cost = if refined.is_empty() { chars } else { chars + 1 };
        if used + cost > budget {
            break;
        }
        if !refined.is_empty() {
            refined.push(' ');
        }
        refined.push_str(sentence);
        used += cost;
    }
    Ok(RefinementResult::new(Some(target), refined, Provenance::RuleBased))
}

/// Rule-based refinement of a whole record: resolves the most-mentioned
/// reference and refines around it, or passes the paragraph through
/// unrefined when the mentions resolve to nothing.
pub fn refine_record_rule_based(record: &FigureRecord, budget: usize) -> Result<RefinementResult> {
    if budget == 0 {
        return Err(Error::InvalidArgument("refinement budget must be positive"));
    }
    match most_mentioned_figure(&record.mentions) {
        Ok(target) => refine_rule_based(&record.paragraph, target, budget),
        Err(Error::NoReference) => Ok(RefinementResult::new(
            None,
            record.paragraph.clone(),
            Provenance::Passthrough,
        )),
        Err(other) => Err(other),
    }
}

/// How to combine the official OCR strings with a re-extracted set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum MergePolicy {
    /// Use the re-extracted strings when present and nonempty.
    #[default]
    PreferAlt,
    /// Use the official strings when nonempty, else the re-extracted ones.
    PreferOfficial,
    /// Official then re-extracted, dropping exact duplicates.
    Union,
}

impl core::str::FromStr for MergePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prefer-alt" => Ok(MergePolicy::PreferAlt),
            "prefer-official" => Ok(MergePolicy::PreferOfficial),
            "union" => Ok(MergePolicy::Union),
            _ => Err(Error::InvalidArgument(
                "merge policy must be `prefer-alt`, `prefer-official`, or `union`",
            )),
        }
    }
}

impl core::fmt::Display for MergePolicy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MergePolicy::PreferAlt => f.write_str("prefer-alt"),
            MergePolicy::PreferOfficial => f.write_str("prefer-official"),
            MergePolicy::Union => f.write_str("union"),
        }
    }
}

/// Merges the two OCR sources under the given policy. Union preserves
/// first-seen order and drops exact duplicate strings.
pub fn merge_ocr(official: &[String], alt: Option<&[String]>, policy: MergePolicy) -> Vec<String> {
    match policy {
        MergePolicy::PreferAlt => match alt {
            Some(alt) if !alt.is_empty() => alt.to_vec(),
            _ => official.to_vec(),
        },
        MergePolicy::PreferOfficial => {
            if official.is_empty() {
                alt.map(<[String]>::to_vec).unwrap_or_default()
            } else {
                official.to_vec()
            }
        }
        MergePolicy::Union => {
            let mut out: Vec<String> = Vec::new();
            for s in official.iter().chain(alt.into_iter().flatten()) {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            out
        }
    }
}

/// Concatenated model input and whether any section was shortened.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AssembledInput {
    pub text: String,
    pub truncated: bool,
}

/// Builds `"<ocr> ... <mention> ... <paragraph> ..."` under a token budget.
///
/// OCR strings (merged under `policy`) and mentions are joined with spaces;
/// the paragraph section is the refined paragraph. When the assembled text
/// would exceed `budget` tokens, content is cut from the paragraph first,
/// then the mentions, then the OCR, each at token boundaries. The three
/// markers cost one token each, so budgets below 3 are treated as 3: the
/// markers always appear exactly once each, in order.
pub fn assemble_input(
    record: &FigureRecord,
    refinement: &RefinementResult,
    policy: MergePolicy,
    budget: usize,
    tok: &TokenizerConfig,
) -> AssembledInput {
    let ocr = merge_ocr(&record.ocr, record.ocr_alt.as_deref(), policy).join(" ");
    let mentions = record.mentions.join(" ");
    let paragraph = refinement.refined_paragraph.as_str();

    let available = budget.max(3) - 3;
    let full = [
        tokenize(&ocr, tok).len(),
        tokenize(&mentions, tok).len(),
        tokenize(paragraph, tok).len(),
    ];
    let keep_ocr = full[0].min(available);
    let keep_mentions = full[1].min(available - keep_ocr);
    let keep_paragraph = full[2].min(available - keep_ocr - keep_mentions);
    let truncated =
        keep_ocr < full[0] || keep_mentions < full[1] || keep_paragraph < full[2];

    let cut = |section: &str, keep: usize, full: usize| -> String {
        if keep == full {
            String::from(section)
        } else {
            String::from(token_prefix(section, keep, tok))
        }
    };
    let text = format!(
        "<ocr> {} <mention> {} <paragraph> {}",
        cut(&ocr, keep_ocr, full[0]),
        cut(&mentions, keep_mentions, full[1]),
        cut(paragraph, keep_paragraph, full[2]),
    );
    AssembledInput { text, truncated }
}
