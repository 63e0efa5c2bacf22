//! Sources of token embeddings, sentence embeddings and cross-encoder pair
//! scores. Files (NDJSON + manifest) and an HTTP service sit behind the same
//! three provider traits.
//!
//! Record texts are addressed by id: `answer_a` of record `q17` is `q17:a`,
//! `answer_b` is `q17:b`. Pair scores are keyed by record id and direction.

mod file;
mod http;

pub use file::{
    file_provider_load, manifest_path_for, write_pair_scores, write_sentence_embeddings,
    write_token_embeddings, FileProvider, PairScoreFile, SentenceEmbeddingFile, TokenEmbeddingFile,
};
pub use http::{HttpConfig, HttpProvider};

use crate::corpus::{Dataset, EvalRecord};
use crate::embmetrics::{self, EmbError, SentenceEmbedding, TokenEmbeddingSet};
use crate::lexmetrics::{LexError, LexicalMetric};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("manifest not found: {0}")]
    MissingManifest(PathBuf),
    #[error("{path}: content hash {actual} does not match manifest {expected}")]
    HashMismatch {
        path: PathBuf,
        expected: String,
        actual: String,
    },
    #[error("manifest mismatch: {0}")]
    ManifestMismatch(String),
    #[error("inconsistent dimensions: {0}")]
    DimensionInconsistent(String),
    #[error("no embedding for text `{0}`")]
    MissingEmbedding(String),
    #[error("no score for pair `{pair_id}` direction {direction}")]
    MissingScore { pair_id: String, direction: Direction },
    #[error("pair `{pair_id}`: score {score} outside [0, 1]")]
    ScoreOutOfRange { pair_id: String, score: f64 },
    #[error("provider holds {found} data, expected {expected}")]
    WrongKind { expected: ProviderKind, found: ProviderKind },
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("remote error {status}: {body}")]
    RemoteError { status: u16, body: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error(transparent)]
    Embedding(#[from] EmbError),
    #[error(transparent)]
    Lexical(#[from] LexError),
}

/// Order in which a pair is fed to a scorer: `Ab` is (answer_a, answer_b).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ab,
    Ba,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Ab => "ab",
            Direction::Ba => "ba",
        }
    }

    /// `(first, second)` texts of a record in this direction.
    pub fn order(self, record: &EvalRecord) -> (&str, &str) {
        match self {
            Direction::Ab => (&record.answer_a, &record.answer_b),
            Direction::Ba => (&record.answer_b, &record.answer_a),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Token,
    Sentence,
    Pair,
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProviderKind::Token => "token",
            ProviderKind::Sentence => "sentence",
            ProviderKind::Pair => "pair",
        })
    }
}

impl FromStr for ProviderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "token" => Ok(ProviderKind::Token),
            "sentence" => Ok(ProviderKind::Sentence),
            "pair" => Ok(ProviderKind::Pair),
            other => Err(format!("unknown provider kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub pair_id: String,
    #[serde(rename = "model")]
    pub model_id: String,
    pub direction: Direction,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderManifest {
    pub model: String,
    pub kind: ProviderKind,
    pub layer: Option<u32>,
    pub dimension: Option<usize>,
    pub record_count: usize,
    pub sha256: String,
}

/// Which answer of a record a text id refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

pub fn text_id(record_id: &str, side: Side) -> String {
    match side {
        Side::A => format!("{record_id}:a"),
        Side::B => format!("{record_id}:b"),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TextRequest<'a> {
    pub id: &'a str,
    pub text: &'a str,
}

#[derive(Debug, Clone, Copy)]
pub struct PairRequest<'a> {
    pub pair_id: &'a str,
    pub first: &'a str,
    pub second: &'a str,
    pub direction: Direction,
}

pub trait TokenEmbeddingProvider: Send + Sync {
    /// One set per request, in request order.
    fn token_embeddings(&self, items: &[TextRequest<'_>]) -> Result<Vec<TokenEmbeddingSet>, ProviderError>;
}

pub trait SentenceEmbeddingProvider: Send + Sync {
    fn sentence_embeddings(&self, items: &[TextRequest<'_>]) -> Result<Vec<SentenceEmbedding>, ProviderError>;
}

pub trait PairScoreProvider: Send + Sync {
    fn pair_scores(&self, pairs: &[PairRequest<'_>]) -> Result<Vec<PairScore>, ProviderError>;
}

/// Stored cross-encoder score for a record in the given direction.
pub fn sas_lookup(
    provider: &dyn PairScoreProvider,
    record: &EvalRecord,
    direction: Direction,
) -> Result<f64, ProviderError> {
    let (first, second) = direction.order(record);
    let req = PairRequest {
        pair_id: &record.id,
        first,
        second,
        direction,
    };
    let scores = provider.pair_scores(&[req])?;
    scores
        .first()
        .map(|s| s.score)
        .ok_or_else(|| ProviderError::MissingScore {
            pair_id: record.id.clone(),
            direction,
        })
}

/// Anything that can score a record in both directions.
pub trait DirectionalScorer {
    fn score(&self, record: &EvalRecord, direction: Direction) -> Result<f64, ProviderError>;
}

impl<F> DirectionalScorer for F
where
    F: Fn(&EvalRecord, Direction) -> Result<f64, ProviderError>,
{
    fn score(&self, record: &EvalRecord, direction: Direction) -> Result<f64, ProviderError> {
        self(record, direction)
    }
}

/// Lexical metric scored as (candidate, reference) = direction order.
pub struct LexicalScorer(pub LexicalMetric);

impl DirectionalScorer for LexicalScorer {
    fn score(&self, record: &EvalRecord, direction: Direction) -> Result<f64, ProviderError> {
        let (first, second) = direction.order(record);
        Ok(self.0.score(second, first, &record.profile())?)
    }
}

pub struct PairScorer<'a>(pub &'a dyn PairScoreProvider);

impl DirectionalScorer for PairScorer<'_> {
    fn score(&self, record: &EvalRecord, direction: Direction) -> Result<f64, ProviderError> {
        sas_lookup(self.0, record, direction)
    }
}

pub struct BiEncoderScorer<'a>(pub &'a dyn SentenceEmbeddingProvider);

impl DirectionalScorer for BiEncoderScorer<'_> {
    fn score(&self, record: &EvalRecord, direction: Direction) -> Result<f64, ProviderError> {
        let ida = text_id(&record.id, Side::A);
        let idb = text_id(&record.id, Side::B);
        let a = TextRequest { id: &ida, text: &record.answer_a };
        let b = TextRequest { id: &idb, text: &record.answer_b };
        let reqs = match direction {
            Direction::Ab => [a, b],
            Direction::Ba => [b, a],
        };
        let embs = self.0.sentence_embeddings(&reqs)?;
        Ok(embmetrics::bi_encoder_score(&embs[0], &embs[1])?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryEntry {
    pub record_id: String,
    pub ab: f64,
    pub ba: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    /// Sorted by descending gap, then record id.
    pub entries: Vec<SymmetryEntry>,
    pub max_gap: Option<f64>,
    pub mean_gap: Option<f64>,
}

pub fn audit_symmetry(
    scorer: &dyn DirectionalScorer,
    dataset: &Dataset,
) -> Result<SymmetryReport, ProviderError> {
    let mut entries = dataset
        .records
        .iter()
        .map(|r| {
            let ab = scorer.score(r, Direction::Ab)?;
            let ba = scorer.score(r, Direction::Ba)?;
            Ok(SymmetryEntry {
                record_id: r.id.clone(),
                ab,
                ba,
                gap: (ab - ba).abs(),
            })
        })
        .collect::<Result<Vec<_>, ProviderError>>()?;
    entries.sort_by(|x, y| y.gap.total_cmp(&x.gap).then_with(|| x.record_id.cmp(&y.record_id)));
    let max_gap = entries.first().map(|e| e.gap);
    let mean_gap = (!entries.is_empty())
        .then(|| entries.iter().map(|e| e.gap).sum::<f64>() / entries.len() as f64);
    Ok(SymmetryReport {
        entries,
        max_gap,
        mean_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexmetrics::LexicalMetric;

    struct Fixed(Vec<PairScore>);

    impl PairScoreProvider for Fixed {
        fn pair_scores(&self, pairs: &[PairRequest<'_>]) -> Result<Vec<PairScore>, ProviderError> {
            pairs
                .iter()
                .map(|p| {
                    self.0
                        .iter()
                        .find(|s| s.pair_id == p.pair_id && s.direction == p.direction)
                        .cloned()
                        .ok_or_else(|| ProviderError::MissingScore {
                            pair_id: p.pair_id.to_owned(),
                            direction: p.direction,
                        })
                })
                .collect()
        }
    }

    fn score(id: &str, direction: Direction, score: f64) -> PairScore {
        PairScore {
            pair_id: id.into(),
            model_id: "ce".into(),
            direction,
            score,
        }
    }

    #[test]
    fn sas_lookup_returns_stored_score() {
        let p = Fixed(vec![score("r1", Direction::Ab, 0.5)]);
        let r = EvalRecord::new("r1", "x", "y");
        assert_eq!(sas_lookup(&p, &r, Direction::Ab).unwrap(), 0.5);
        assert!(matches!(
            sas_lookup(&p, &r, Direction::Ba),
            Err(ProviderError::MissingScore { direction: Direction::Ba, .. })
        ));
    }

    #[test]
    fn asymmetric_pair_tops_the_report() {
        let p = Fixed(vec![
            score("n11", Direction::Ab, 0.89),
            score("n11", Direction::Ba, 0.09),
            score("x", Direction::Ab, 0.4),
            score("x", Direction::Ba, 0.5),
        ]);
        let d = Dataset::new(
            "t",
            vec![EvalRecord::new("x", "p", "q"), EvalRecord::new("n11", "eleven", "11")],
        );
        let rep = audit_symmetry(&PairScorer(&p), &d).unwrap();
        assert_eq!(rep.entries[0].record_id, "n11");
        assert!((rep.entries[0].gap - 0.80).abs() < 1e-12);
        assert!((rep.max_gap.unwrap() - 0.80).abs() < 1e-12);
        assert!((rep.mean_gap.unwrap() - 0.45).abs() < 1e-12);
    }

    #[test]
    fn symmetric_metric_has_zero_gaps() {
        let d = Dataset::new(
            "t",
            vec![
                EvalRecord::new("1", "National Football League", "the NFL"),
                EvalRecord::new("2", "a b c", "b c d e"),
            ],
        );
        let rep = audit_symmetry(&LexicalScorer(LexicalMetric::F1), &d).unwrap();
        assert!(rep.entries.iter().all(|e| e.gap == 0.0));
    }

    #[test]
    fn empty_dataset_gives_empty_report() {
        let rep = audit_symmetry(&LexicalScorer(LexicalMetric::F1), &Dataset::new("e", vec![])).unwrap();
        assert!(rep.entries.is_empty());
        assert_eq!(rep.max_gap, None);
        assert_eq!(rep.mean_gap, None);
    }

    #[test]
    fn text_ids_follow_record_side_convention() {
        assert_eq!(text_id("q17", Side::A), "q17:a");
        assert_eq!(text_id("q17", Side::B), "q17:b");
    }
}
