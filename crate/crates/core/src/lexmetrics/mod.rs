//! String-overlap metrics for short answers: exact match, token F1, sentence
//! BLEU, ROUGE-L and an exact+stem METEOR.
//!
//! Every metric tokenizes both sides with the same [`NormalizationProfile`].
//! BLEU, ROUGE-L and METEOR take `(candidate, reference)`; they are not
//! symmetric in general.

mod normalize;
pub mod porter;

pub use normalize::{Lang, NormalizationProfile};

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexError {
    #[error("text normalizes to zero tokens: {0:?}")]
    EmptyText(String),
    #[error("metric not available for language `{0}`")]
    UnsupportedLanguage(Lang),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LexicalMetric {
    #[serde(rename = "em")]
    ExactMatch,
    #[serde(rename = "f1")]
    F1,
    #[serde(rename = "bleu")]
    Bleu,
    #[serde(rename = "rouge_l")]
    RougeL,
    #[serde(rename = "meteor")]
    Meteor,
}

impl LexicalMetric {
    pub const ALL: [LexicalMetric; 5] = [
        LexicalMetric::ExactMatch,
        LexicalMetric::F1,
        LexicalMetric::Bleu,
        LexicalMetric::RougeL,
        LexicalMetric::Meteor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LexicalMetric::ExactMatch => "em",
            LexicalMetric::F1 => "f1",
            LexicalMetric::Bleu => "bleu",
            LexicalMetric::RougeL => "rouge_l",
            LexicalMetric::Meteor => "meteor",
        }
    }

    /// Scores `candidate` against `reference`.
    pub fn score(
        self,
        candidate: &str,
        reference: &str,
        norm: &NormalizationProfile,
    ) -> Result<f64, LexError> {
        Ok(match self {
            LexicalMetric::ExactMatch => exact_match(candidate, reference, norm),
            LexicalMetric::F1 => token_f1(candidate, reference, norm),
            LexicalMetric::Bleu => bleu(candidate, reference, norm)?,
            LexicalMetric::RougeL => rouge_l(candidate, reference, norm)?,
            LexicalMetric::Meteor => meteor(candidate, reference, norm)?,
        })
    }
}

impl fmt::Display for LexicalMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LexicalMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LexicalMetric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown lexical metric `{s}`"))
    }
}

/// A lexical metric value, always within [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LexicalScore {
    pub metric: LexicalMetric,
    pub value: f64,
}

/// 1.0 when both texts normalize to the same token sequence, else 0.0.
pub fn exact_match(a: &str, b: &str, norm: &NormalizationProfile) -> f64 {
    if norm.tokens(a) == norm.tokens(b) {
        1.0
    } else {
        0.0
    }
}

/// SQuAD-style bag-of-tokens F1. Two empty token lists count as a match.
pub fn token_f1(a: &str, b: &str, norm: &NormalizationProfile) -> f64 {
    let ta = norm.tokens(a);
    let tb = norm.tokens(b);
    if ta.is_empty() || tb.is_empty() {
        return if ta.is_empty() && tb.is_empty() { 1.0 } else { 0.0 };
    }
    let overlap = multiset_overlap(&ta, &tb);
    if overlap == 0 {
        return 0.0;
    }
    2.0 * overlap as f64 / (ta.len() + tb.len()) as f64
}

fn multiset_overlap<T: AsRef<str>>(a: &[T], b: &[T]) -> usize {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in a {
        *counts.entry(t.as_ref()).or_default() += 1;
    }
    let mut overlap = 0;
    for t in b {
        if let Some(c) = counts.get_mut(t.as_ref()) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    overlap
}

fn non_empty_tokens(text: &str, norm: &NormalizationProfile) -> Result<Vec<String>, LexError> {
    let t = norm.tokens(text);
    if t.is_empty() {
        Err(LexError::EmptyText(text.to_owned()))
    } else {
        Ok(t)
    }
}

const MAX_BLEU_ORDER: usize = 4;

/// Unsmoothed sentence BLEU with uniform weights over orders
/// `1..=min(4, |candidate|)`.
pub fn bleu(candidate: &str, reference: &str, norm: &NormalizationProfile) -> Result<f64, LexError> {
    let cand = non_empty_tokens(candidate, norm)?;
    let refr = non_empty_tokens(reference, norm)?;
    let max_order = MAX_BLEU_ORDER.min(cand.len());

    let mut log_sum = 0.0;
    for n in 1..=max_order {
        let cand_ngrams = ngram_counts(&cand, n);
        let ref_ngrams = ngram_counts(&refr, n);
        let clipped: usize = cand_ngrams
            .iter()
            .map(|(g, &c)| c.min(ref_ngrams.get(g).copied().unwrap_or(0)))
            .sum();
        if clipped == 0 {
            return Ok(0.0);
        }
        let total = cand.len() + 1 - n;
        log_sum += (clipped as f64 / total as f64).ln();
    }
    let c = cand.len() as f64;
    let r = refr.len() as f64;
    let brevity = if c < r { (1.0 - r / c).exp() } else { 1.0 };
    Ok((brevity * (log_sum / max_order as f64).exp()).clamp(0.0, 1.0))
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for w in tokens.windows(n) {
        *counts.entry(w).or_default() += 1;
    }
    counts
}

/// Length of the longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if b.len() <= 64 {
        return lcs_bits(a, b);
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

// Bit-parallel row update (Allison-Dix); zero bits of `v` count the LCS.
fn lcs_bits<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let full = if b.len() == 64 { u64::MAX } else { (1u64 << b.len()) - 1 };
    let mut v = full;
    for x in a {
        let mut m = 0u64;
        for (j, y) in b.iter().enumerate() {
            m |= u64::from(x == y) << j;
        }
        let u = v & m;
        v = (v.wrapping_add(u) | (v & !m)) & full;
    }
    (full & !v).count_ones() as usize
}

/// ROUGE-L F-measure with beta = 1.
pub fn rouge_l(candidate: &str, reference: &str, norm: &NormalizationProfile) -> Result<f64, LexError> {
    let cand = non_empty_tokens(candidate, norm)?;
    let refr = non_empty_tokens(reference, norm)?;
    Ok(rouge_l_tokens(&cand, &refr))
}

pub fn rouge_l_tokens<T: PartialEq>(cand: &[T], refr: &[T]) -> f64 {
    let lcs = lcs_len(cand, refr);
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / cand.len() as f64;
    let r = lcs as f64 / refr.len() as f64;
    2.0 * p * r / (p + r)
}

/// Identifies the METEOR configuration in run metadata.
pub const METEOR_VARIANT: &str = "exact+porter_stem;fmean=10PR/(R+9P);penalty=0.5*(chunks/m)^3;greedy-leftmost";

const METEOR_ALPHA_WEIGHT: f64 = 9.0;
const METEOR_GAMMA: f64 = 0.5;
const METEOR_BETA: i32 = 3;

/// METEOR with exact and Porter-stem matching stages (no synonym stage).
///
/// Alignment is greedy per stage: each unmatched candidate token, left to
/// right, takes the leftmost unmatched reference token it matches.
pub fn meteor(candidate: &str, reference: &str, norm: &NormalizationProfile) -> Result<f64, LexError> {
    if norm.language != Lang::En {
        return Err(LexError::UnsupportedLanguage(norm.language));
    }
    let cand = non_empty_tokens(candidate, norm)?;
    let refr = non_empty_tokens(reference, norm)?;

    let mut cand_to_ref: Vec<Option<usize>> = vec![None; cand.len()];
    let mut ref_taken = vec![false; refr.len()];
    align_stage(&cand, &refr, &mut cand_to_ref, &mut ref_taken);
    let cand_stems: Vec<String> = cand.iter().map(|t| porter::stem(t)).collect();
    let ref_stems: Vec<String> = refr.iter().map(|t| porter::stem(t)).collect();
    align_stage(&cand_stems, &ref_stems, &mut cand_to_ref, &mut ref_taken);

    let matches: Vec<(usize, usize)> = cand_to_ref
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|j| (i, j)))
        .collect();
    let m = matches.len();
    if m == 0 {
        return Ok(0.0);
    }
    let chunks = 1 + matches
        .windows(2)
        .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
        .count();

    let m = m as f64;
    let precision = m / cand.len() as f64;
    let recall = m / refr.len() as f64;
    let fmean = (1.0 + METEOR_ALPHA_WEIGHT) * precision * recall
        / (recall + METEOR_ALPHA_WEIGHT * precision);
    let penalty = METEOR_GAMMA * (chunks as f64 / m).powi(METEOR_BETA);
    Ok((fmean * (1.0 - penalty)).clamp(0.0, 1.0))
}

fn align_stage(
    cand: &[String],
    refr: &[String],
    cand_to_ref: &mut [Option<usize>],
    ref_taken: &mut [bool],
) {
    for (i, tok) in cand.iter().enumerate() {
        if cand_to_ref[i].is_some() {
            continue;
        }
        if let Some(j) = (0..refr.len()).find(|&j| !ref_taken[j] && refr[j] == *tok) {
            cand_to_ref[i] = Some(j);
            ref_taken[j] = true;
        }
    }
}
