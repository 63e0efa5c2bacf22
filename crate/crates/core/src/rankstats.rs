//! Pearson, Spearman and Kendall (tau-b) correlation.
//!
//! Kendall uses Knight's O(n log n) merge-sort formulation; ties in either
//! variable are corrected for in the denominator.

use crate::corpus::{Dataset, PartitionKey};
use crate::lexmetrics::NormalizationProfile;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, got {0}")]
    InsufficientData(usize),
    #[error("input is constant")]
    ConstantInput,
    #[error("all values tied")]
    AllTied,
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("no score for labeled record `{0}`")]
    MissingScore(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTriple {
    pub pearson_r: f64,
    pub spearman_rho: f64,
    pub kendall_tau: f64,
    pub n: usize,
}

impl CorrelationTriple {
    pub fn compute(x: &[f64], y: &[f64]) -> Result<Self, StatsError> {
        Ok(Self {
            pearson_r: pearson(x, y)?,
            spearman_rho: spearman(x, y)?,
            kendall_tau: kendall(x, y)?,
            n: x.len(),
        })
    }
}

fn check(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::InsufficientData(x.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

/// Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Kendall tau-b.
pub fn kendall(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check(x, y)?;
    let n = x.len();
    let n0 = (n * (n - 1) / 2) as i64;

    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let tied_x = tied_pairs(&pairs, |a, b| a.0 == b.0);
    let tied_xy = tied_pairs(&pairs, |a, b| a.0 == b.0 && a.1 == b.1);

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = merge_sort_count(&mut ys) as i64;
    let tied_y = tied_pairs(&ys, |a, b| a == b);

    if tied_x == n0 || tied_y == n0 {
        return Err(StatsError::AllTied);
    }
    let concordant_minus_discordant = n0 - tied_x - tied_y + tied_xy - 2 * swaps;
    let denom = (((n0 - tied_x) as f64) * ((n0 - tied_y) as f64)).sqrt();
    Ok((concordant_minus_discordant as f64 / denom).clamp(-1.0, 1.0))
}

/// Number of pairs within runs of adjacent equal elements of a sorted slice.
fn tied_pairs<T>(sorted: &[T], eq: impl Fn(&T, &T) -> bool) -> i64 {
    let mut total = 0i64;
    let mut run = 1i64;
    for w in sorted.windows(2) {
        if eq(&w[0], &w[1]) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Sorts ascending and returns the number of inversions (strictly greater
/// element before a smaller one).
fn merge_sort_count(v: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mut buf = v.to_vec();
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid && j < end {
                if v[j].total_cmp(&v[i]) == Ordering::Less {
                    swaps += (mid - i) as u64;
                    buf[k] = v[j];
                    j += 1;
                } else {
                    buf[k] = v[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - i)].copy_from_slice(&v[i..mid]);
            k += mid - i;
            buf[k..k + (end - j)].copy_from_slice(&v[j..end]);
            start = end;
        }
        v.copy_from_slice(&buf);
        width *= 2;
    }
    swaps
}

/// Why a partition has no correlation numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Degenerate {
    InsufficientData,
    ConstantScores,
    ConstantLabels,
}

impl Degenerate {
    pub fn as_str(self) -> &'static str {
        match self {
            Degenerate::InsufficientData => "InsufficientData",
            Degenerate::ConstantScores => "ConstantScores",
            Degenerate::ConstantLabels => "ConstantLabels",
        }
    }
}

impl fmt::Display for Degenerate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartitionOutcome {
    Triple(CorrelationTriple),
    Degenerate { reason: Degenerate, n: usize },
}

impl PartitionOutcome {
    pub fn triple(&self) -> Option<&CorrelationTriple> {
        match self {
            PartitionOutcome::Triple(t) => Some(t),
            PartitionOutcome::Degenerate { .. } => None,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            PartitionOutcome::Triple(t) => t.n,
            PartitionOutcome::Degenerate { n, .. } => *n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedCorrelation {
    pub outcomes: BTreeMap<PartitionKey, PartitionOutcome>,
    /// Records skipped because they carry no label.
    pub unlabeled: usize,
}

fn correlate_or_mark(x: &[f64], y: &[f64]) -> PartitionOutcome {
    let n = x.len();
    let constant = |v: &[f64]| v.windows(2).all(|w| w[0] == w[1]);
    let reason = if n < 2 {
        Degenerate::InsufficientData
    } else if constant(x) {
        Degenerate::ConstantScores
    } else if constant(y) {
        Degenerate::ConstantLabels
    } else {
        match CorrelationTriple::compute(x, y) {
            Ok(t) => return PartitionOutcome::Triple(t),
            // constant checks above rule out every other failure for finite input
            Err(_) => Degenerate::InsufficientData,
        }
    };
    PartitionOutcome::Degenerate { reason, n }
}

/// Correlates `scores` (keyed by record id) against human labels on the
/// F1 = 0, F1 != 0 and full partitions of `d`.
pub fn correlate_partitioned<S: ScoreLookup + ?Sized>(
    d: &Dataset,
    scores: &S,
    norm: &NormalizationProfile,
) -> Result<PartitionedCorrelation, StatsError> {
    let mut xs: BTreeMap<PartitionKey, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for key in PartitionKey::ORDER {
        xs.insert(key, (Vec::new(), Vec::new()));
    }
    let mut unlabeled = 0;
    for rec in &d.records {
        let Some(label) = rec.label else {
            unlabeled += 1;
            continue;
        };
        let score = scores
            .score_of(&rec.id)
            .ok_or_else(|| StatsError::MissingScore(rec.id.clone()))?;
        if !score.is_finite() {
            return Err(StatsError::NonFinite);
        }
        let y = f64::from(label.value());
        for key in [PartitionKey::of(rec, norm), PartitionKey::All] {
            let (sx, sy) = xs.get_mut(&key).expect("all keys present");
            sx.push(score);
            sy.push(y);
        }
    }
    let outcomes = xs
        .into_iter()
        .map(|(k, (x, y))| (k, correlate_or_mark(&x, &y)))
        .collect();
    Ok(PartitionedCorrelation { outcomes, unlabeled })
}

/// Id-keyed score collections accepted by [`correlate_partitioned`].
pub trait ScoreLookup {
    fn score_of(&self, id: &str) -> Option<f64>;
}

impl ScoreLookup for BTreeMap<String, f64> {
    fn score_of(&self, id: &str) -> Option<f64> {
        self.get(id).copied()
    }
}

impl ScoreLookup for HashMap<String, f64> {
    fn score_of(&self, id: &str) -> Option<f64> {
        self.get(id).copied()
    }
}
