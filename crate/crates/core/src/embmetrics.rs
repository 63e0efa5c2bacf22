//! Embedding-based similarity: greedy-max token matching (BERTScore style)
//! with optional idf weights, and cosine similarity of pooled sentence
//! vectors.

use crate::corpus::{Dataset, EvalRecord, PartitionKey};
use crate::lexmetrics::NormalizationProfile;
use crate::rankstats::{correlate_partitioned, PartitionOutcome};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero vector")]
    ZeroVector,
    #[error("model mismatch: `{0}` vs `{1}`")]
    ModelMismatch(String, String),
    #[error("layer mismatch: {0} vs {1}")]
    LayerMismatch(u32, u32),
    #[error("invalid embedding for `{text_id}`: {reason}")]
    InvalidEmbedding { text_id: String, reason: String },
    #[error("idf corpus is empty")]
    EmptyCorpus,
    #[error("no embeddings for layer {0}")]
    MissingLayer(u32),
}

/// Cosine similarity, clamped to [-1, 1].
pub fn cosine(u: &[f32], v: &[f32]) -> Result<f64, EmbError> {
    if u.len() != v.len() {
        return Err(EmbError::DimensionMismatch(u.len(), v.len()));
    }
    let (mut dot, mut nu, mut nv) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (f64::from(a), f64::from(b));
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(EmbError::ZeroVector);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

fn check_vector(text_id: &str, v: &[f32]) -> Result<(), EmbError> {
    let invalid = |reason: &str| EmbError::InvalidEmbedding {
        text_id: text_id.to_owned(),
        reason: reason.to_owned(),
    };
    if v.is_empty() {
        return Err(invalid("empty vector"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid("non-finite component"));
    }
    if v.iter().all(|&x| x == 0.0) {
        return Err(invalid("all-zero vector"));
    }
    Ok(())
}

/// Per-token vectors of one text, taken from one model layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenEmbeddingSet {
    pub text_id: String,
    pub model_id: String,
    pub layer: u32,
    pub tokens: Vec<String>,
    pub vectors: Vec<Vec<f32>>,
}

impl TokenEmbeddingSet {
    pub fn new(
        text_id: impl Into<String>,
        model_id: impl Into<String>,
        layer: u32,
        tokens: Vec<String>,
        vectors: Vec<Vec<f32>>,
    ) -> Result<Self, EmbError> {
        let set = Self {
            text_id: text_id.into(),
            model_id: model_id.into(),
            layer,
            tokens,
            vectors,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<(), EmbError> {
        let invalid = |reason: String| EmbError::InvalidEmbedding {
            text_id: self.text_id.clone(),
            reason,
        };
        if self.tokens.is_empty() {
            return Err(invalid("no tokens".into()));
        }
        if self.tokens.len() != self.vectors.len() {
            return Err(invalid(format!(
                "{} tokens but {} vectors",
                self.tokens.len(),
                self.vectors.len()
            )));
        }
        let d = self.vectors[0].len();
        for v in &self.vectors {
            if v.len() != d {
                return Err(invalid(format!("mixed dimensions {d} and {}", v.len())));
            }
            check_vector(&self.text_id, v)?;
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.vectors[0].len()
    }
}

/// Pooled vector of one text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceEmbedding {
    pub text_id: String,
    pub model_id: String,
    pub vector: Vec<f32>,
}

impl SentenceEmbedding {
    pub fn new(text_id: impl Into<String>, model_id: impl Into<String>, vector: Vec<f32>) -> Result<Self, EmbError> {
        let e = Self {
            text_id: text_id.into(),
            model_id: model_id.into(),
            vector,
        };
        check_vector(&e.text_id, &e.vector)?;
        Ok(e)
    }
}

/// Token weights `ln((M + 1) / (df + 1))` over a document collection of size M.
#[derive(Debug, Clone, PartialEq)]
pub struct IdfTable {
    pub model_id: String,
    pub doc_count: usize,
    doc_freq: HashMap<String, usize>,
}

impl IdfTable {
    pub fn weight(&self, token: &str) -> f64 {
        let df = self.doc_freq.get(token).copied().unwrap_or(0);
        ((self.doc_count + 1) as f64 / (df + 1) as f64).ln()
    }

    pub fn doc_freq(&self, token: &str) -> usize {
        self.doc_freq.get(token).copied().unwrap_or(0)
    }
}

/// Document frequencies count each token at most once per document.
pub fn build_idf<I, D, T>(model_id: impl Into<String>, corpus: I) -> Result<IdfTable, EmbError>
where
    I: IntoIterator<Item = D>,
    D: IntoIterator<Item = T>,
    T: AsRef<str>,
{
    let mut doc_freq: HashMap<String, usize> = HashMap::new();
    let mut doc_count = 0;
    for doc in corpus {
        doc_count += 1;
        let unique: HashSet<String> = doc.into_iter().map(|t| t.as_ref().to_owned()).collect();
        for t in unique {
            *doc_freq.entry(t).or_default() += 1;
        }
    }
    if doc_count == 0 {
        return Err(EmbError::EmptyCorpus);
    }
    Ok(IdfTable {
        model_id: model_id.into(),
        doc_count,
        doc_freq,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BertScoreTriple {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl BertScoreTriple {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self { precision, recall, f1 }
    }
}

/// Greedy-max token matching. Recall averages, over reference tokens, each
/// token's best cosine against the candidate; precision does the same over
/// candidate tokens. Tokens are weighted by idf when a table is given.
pub fn bert_score(
    reference: &TokenEmbeddingSet,
    candidate: &TokenEmbeddingSet,
    idf: Option<&IdfTable>,
) -> Result<BertScoreTriple, EmbError> {
    if reference.model_id != candidate.model_id {
        return Err(EmbError::ModelMismatch(reference.model_id.clone(), candidate.model_id.clone()));
    }
    if reference.layer != candidate.layer {
        return Err(EmbError::LayerMismatch(reference.layer, candidate.layer));
    }
    let sim = similarity_matrix(&reference.vectors, &candidate.vectors)?;
    let ref_best: Vec<f64> = sim
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let cand_best: Vec<f64> = (0..candidate.vectors.len())
        .map(|j| sim.iter().map(|row| row[j]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let recall = weighted_mean(&ref_best, &reference.tokens, idf);
    let precision = weighted_mean(&cand_best, &candidate.tokens, idf);
    Ok(BertScoreTriple::from_pr(precision, recall))
}

fn similarity_matrix(rows: &[Vec<f32>], cols: &[Vec<f32>]) -> Result<Vec<Vec<f64>>, EmbError> {
    let unit = |v: &Vec<f32>| -> Result<Vec<f64>, EmbError> {
        let norm = v.iter().map(|&x| f64::from(x).powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(EmbError::ZeroVector);
        }
        Ok(v.iter().map(|&x| f64::from(x) / norm).collect())
    };
    let rows: Vec<Vec<f64>> = rows.iter().map(unit).collect::<Result<_, _>>()?;
    let cols: Vec<Vec<f64>> = cols.iter().map(unit).collect::<Result<_, _>>()?;
    if let (Some(r), Some(c)) = (rows.first(), cols.first()) {
        if r.len() != c.len() {
            return Err(EmbError::DimensionMismatch(r.len(), c.len()));
        }
    }
    Ok(rows
        .iter()
        .map(|r| {
            cols.iter()
                .map(|c| r.iter().zip(c).map(|(a, b)| a * b).sum::<f64>().clamp(-1.0, 1.0))
                .collect()
        })
        .collect())
}

fn weighted_mean(values: &[f64], tokens: &[String], idf: Option<&IdfTable>) -> f64 {
    if let Some(idf) = idf {
        let weights: Vec<f64> = tokens.iter().map(|t| idf.weight(t)).collect();
        let total: f64 = weights.iter().sum();
        // every token ubiquitous: no token carries information, fall back to uniform
        if total > 0.0 {
            return values.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>() / total;
        }
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Cosine of two pooled sentence vectors from the same model.
pub fn bi_encoder_score(a: &SentenceEmbedding, b: &SentenceEmbedding) -> Result<f64, EmbError> {
    if a.model_id != b.model_id {
        return Err(EmbError::ModelMismatch(a.model_id.clone(), b.model_id.clone()));
    }
    cosine(&a.vector, &b.vector)
}

/// One row of a layer sweep: the correlation outcome of BERTScore F1 at one
/// layer on one partition.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSweepRow {
    pub layer: u32,
    pub partition: PartitionKey,
    pub outcome: PartitionOutcome,
}

/// Scores every labeled record with BERTScore F1 at each requested layer and
/// correlates against labels per overlap partition.
///
/// `lookup(layer, record)` returns the (reference, candidate) token sets for a
/// record at a layer; it returns `Ok(None)` when the layer is not available.
pub fn layer_sweep<F, E>(
    dataset: &Dataset,
    layers: &[u32],
    norm: &NormalizationProfile,
    idf: Option<&IdfTable>,
    mut lookup: F,
) -> Result<Vec<LayerSweepRow>, E>
where
    F: FnMut(u32, &EvalRecord) -> Result<Option<(TokenEmbeddingSet, TokenEmbeddingSet)>, E>,
    E: From<EmbError> + From<crate::rankstats::StatsError>,
{
    let mut rows = Vec::new();
    for &layer in layers {
        let mut scores: BTreeMap<String, f64> = BTreeMap::new();
        for rec in &dataset.records {
            let (reference, candidate) = lookup(layer, rec)?.ok_or(EmbError::MissingLayer(layer))?;
            scores.insert(rec.id.clone(), bert_score(&reference, &candidate, idf)?.f1);
        }
        let corr = correlate_partitioned(dataset, &scores, norm)?;
        for (partition, outcome) in corr.outcomes {
            rows.push(LayerSweepRow {
                layer,
                partition,
                outcome,
            });
        }
    }
    Ok(rows)
}
