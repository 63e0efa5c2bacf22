//! End-to-end evaluation runs: score every record with each configured
//! metric, correlate against labels per overlap partition and write
//! `correlations.csv`, `scores.ndjson`, `histogram.csv`, `timings.csv` and
//! `run_info.json`.

mod config;

pub use config::{parse_bool, parse_kv, parse_metric_list, Binding, HttpSettings, MetricKind, MetricSpec, NormChoice, RunConfig};

use crate::corpus::{load_dataset, CorpusError, Dataset, DatasetFormat, EvalRecord, PartitionKey};
use crate::embmetrics::{self, EmbError, IdfTable, LayerSweepRow, TokenEmbeddingSet};
use crate::lexmetrics::{Lang, LexError, NormalizationProfile, METEOR_VARIANT};
use crate::providers::{
    file_provider_load, text_id, Direction, HttpProvider, PairRequest, PairScoreProvider, ProviderError,
    SentenceEmbeddingProvider, Side, TextRequest, TokenEmbeddingFile, TokenEmbeddingProvider,
};
use crate::rankstats::{correlate_partitioned, PartitionOutcome, PartitionedCorrelation, StatsError};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("metric `{metric}`{}: {source}", at(.record))]
    Provider {
        metric: String,
        record: Option<String>,
        #[source]
        source: ProviderError,
    },
    #[error("metric `{metric}`{}: {message}", at(.record))]
    Metric {
        metric: String,
        record: Option<String>,
        message: String,
    },
    #[error("metric `{metric}`: {source}")]
    Stats {
        metric: String,
        #[source]
        source: StatsError,
    },
}

fn at(record: &Option<String>) -> String {
    record.as_ref().map(|r| format!(", record `{r}`")).unwrap_or_default()
}

impl ReportError {
    /// Provider and transport failures, as opposed to bad input or config.
    pub fn is_provider(&self) -> bool {
        matches!(self, ReportError::Provider { .. })
    }

    pub fn metric(&self) -> Option<&str> {
        match self {
            ReportError::Provider { metric, .. }
            | ReportError::Metric { metric, .. }
            | ReportError::Stats { metric, .. } => Some(metric),
            _ => None,
        }
    }

    pub fn record(&self) -> Option<&str> {
        match self {
            ReportError::Provider { record, .. } | ReportError::Metric { record, .. } => record.as_deref(),
            _ => None,
        }
    }
}

/// Record id an error points at, recovered from the text or pair id.
fn record_of(e: &ProviderError) -> Option<String> {
    let tid = match e {
        ProviderError::MissingEmbedding(t) => t,
        ProviderError::MissingScore { pair_id, .. } | ProviderError::ScoreOutOfRange { pair_id, .. } => {
            return Some(pair_id.clone())
        }
        ProviderError::Embedding(EmbError::InvalidEmbedding { text_id, .. }) => text_id,
        _ => return None,
    };
    Some(tid.rsplit_once(':').map_or(tid.as_str(), |(r, _)| r).to_owned())
}

fn provider_err(metric: &str) -> impl Fn(ProviderError) -> ReportError + '_ {
    move |source| ReportError::Provider {
        metric: metric.to_owned(),
        record: record_of(&source),
        source,
    }
}

/// Scores of one metric, aligned with the dataset records.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricVector {
    pub metric: String,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct MetricResult {
    pub spec: MetricSpec,
    pub scores: MetricVector,
    pub correlation: PartitionedCorrelation,
    pub seconds: f64,
    pub model_id: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub dataset: Dataset,
    pub normalization: NormChoice,
    pub idf: bool,
    pub seed: u64,
    /// Overlap bucket of each record, aligned with the records.
    pub partitions: Vec<PartitionKey>,
    pub metrics: Vec<MetricResult>,
}

struct Scored {
    scores: Vec<f64>,
    model_id: Option<String>,
}

fn text_requests<'a>(records: &'a [EvalRecord], ids: &'a [(String, String)]) -> Vec<TextRequest<'a>> {
    records
        .iter()
        .zip(ids)
        .flat_map(|(r, (ia, ib))| {
            [
                TextRequest { id: ia, text: &r.answer_a },
                TextRequest { id: ib, text: &r.answer_b },
            ]
        })
        .collect()
}

fn record_text_ids(records: &[EvalRecord]) -> Vec<(String, String)> {
    records
        .iter()
        .map(|r| (text_id(&r.id, Side::A), text_id(&r.id, Side::B)))
        .collect()
}

/// Collects per-record results in order, reporting the first failure by
/// record position regardless of scheduling.
fn ordered<T: Send>(results: Vec<Result<T, ReportError>>) -> Result<Vec<T>, ReportError> {
    results.into_iter().collect()
}

fn binding<'a>(cfg: &'a RunConfig, name: &str) -> Result<&'a Binding, ReportError> {
    cfg.bindings
        .get(name)
        .ok_or_else(|| ReportError::Config(format!("metric `{name}` has no provider binding")))
}

/// Token embedding provider bound to metric `name` in the config.
pub fn token_provider(cfg: &RunConfig, name: &str) -> Result<Box<dyn TokenEmbeddingProvider>, ReportError> {
    let p: Box<dyn TokenEmbeddingProvider> = match binding(cfg, name)? {
        Binding::File(p) => Box::new(
            file_provider_load(p)
                .and_then(|f| f.into_token())
                .map_err(provider_err(name))?,
        ),
        Binding::Endpoint(url) => {
            let layer = cfg.layers.get(name).copied().unwrap_or(0);
            Box::new(HttpProvider::new(cfg.http.config(url, layer)).map_err(provider_err(name))?)
        }
    };
    Ok(p)
}

pub fn sentence_provider(cfg: &RunConfig, name: &str) -> Result<Box<dyn SentenceEmbeddingProvider>, ReportError> {
    let p: Box<dyn SentenceEmbeddingProvider> = match binding(cfg, name)? {
        Binding::File(p) => Box::new(
            file_provider_load(p)
                .and_then(|f| f.into_sentence())
                .map_err(provider_err(name))?,
        ),
        Binding::Endpoint(url) => Box::new(HttpProvider::new(cfg.http.config(url, 0)).map_err(provider_err(name))?),
    };
    Ok(p)
}

pub fn pair_provider(cfg: &RunConfig, name: &str) -> Result<Box<dyn PairScoreProvider>, ReportError> {
    let p: Box<dyn PairScoreProvider> = match binding(cfg, name)? {
        Binding::File(p) => Box::new(
            file_provider_load(p)
                .and_then(|f| f.into_pair())
                .map_err(provider_err(name))?,
        ),
        Binding::Endpoint(url) => Box::new(HttpProvider::new(cfg.http.config(url, 0)).map_err(provider_err(name))?),
    };
    Ok(p)
}

fn idf_from_references(sets: &[TokenEmbeddingSet]) -> Result<Option<IdfTable>, EmbError> {
    let Some(first) = sets.first() else { return Ok(None) };
    let refs = sets.iter().step_by(2).map(|s| s.tokens.iter());
    embmetrics::build_idf(first.model_id.clone(), refs).map(Some)
}

fn score_metric(spec: &MetricSpec, d: &Dataset, cfg: &RunConfig) -> Result<Scored, ReportError> {
    let name = spec.name();
    let metric_err = |record: Option<&str>, message: String| ReportError::Metric {
        metric: name.clone(),
        record: record.map(str::to_owned),
        message,
    };
    let records = &d.records;
    match spec.kind {
        MetricKind::Lexical(m) => {
            let results: Vec<_> = records
                .par_iter()
                .map(|r| {
                    let norm = cfg.normalization.profile_for(r.lang);
                    match m.score(&r.answer_b, &r.answer_a, &norm) {
                        Ok(v) => Ok(v),
                        Err(LexError::EmptyText(_)) => Ok(0.0),
                        Err(e) => Err(metric_err(Some(&r.id), e.to_string())),
                    }
                })
                .collect();
            Ok(Scored {
                scores: ordered(results)?,
                model_id: None,
            })
        }
        MetricKind::BertScore => {
            let p = token_provider(cfg, &name)?;
            let ids = record_text_ids(records);
            let sets = p
                .token_embeddings(&text_requests(records, &ids))
                .map_err(provider_err(&name))?;
            let idf = if cfg.idf {
                idf_from_references(&sets).map_err(|e| metric_err(None, e.to_string()))?
            } else {
                None
            };
            let results: Vec<_> = records
                .par_iter()
                .zip(sets.par_chunks(2))
                .map(|(r, pair)| {
                    embmetrics::bert_score(&pair[0], &pair[1], idf.as_ref())
                        .map(|t| t.f1)
                        .map_err(|e| metric_err(Some(&r.id), e.to_string()))
                })
                .collect();
            Ok(Scored {
                scores: ordered(results)?,
                model_id: sets.first().map(|s| s.model_id.clone()),
            })
        }
        MetricKind::BiEncoder => {
            let p = sentence_provider(cfg, &name)?;
            let ids = record_text_ids(records);
            let embs = p
                .sentence_embeddings(&text_requests(records, &ids))
                .map_err(provider_err(&name))?;
            let results: Vec<_> = records
                .par_iter()
                .zip(embs.par_chunks(2))
                .map(|(r, pair)| {
                    embmetrics::bi_encoder_score(&pair[0], &pair[1])
                        .map_err(|e| metric_err(Some(&r.id), e.to_string()))
                })
                .collect();
            Ok(Scored {
                scores: ordered(results)?,
                model_id: embs.first().map(|e| e.model_id.clone()),
            })
        }
        MetricKind::Sas => {
            let p = pair_provider(cfg, &name)?;
            let reqs: Vec<PairRequest> = records
                .iter()
                .map(|r| PairRequest {
                    pair_id: &r.id,
                    first: &r.answer_a,
                    second: &r.answer_b,
                    direction: Direction::Ab,
                })
                .collect();
            let scores = p.pair_scores(&reqs).map_err(provider_err(&name))?;
            Ok(Scored {
                model_id: scores.first().map(|s| s.model_id.clone()),
                scores: scores.into_iter().map(|s| s.score).collect(),
            })
        }
    }
}

fn partition_profile(cfg: &RunConfig, d: &Dataset) -> NormalizationProfile {
    cfg.normalization.profile_for(d.lang)
}

/// Scores and correlates an already loaded dataset.
pub fn evaluate_dataset(dataset: Dataset, cfg: &RunConfig) -> Result<ReportBundle, ReportError> {
    cfg.validate()?;
    let norm = partition_profile(cfg, &dataset);
    let partitions = dataset.records.iter().map(|r| PartitionKey::of(r, &norm)).collect();
    let mut metrics = Vec::with_capacity(cfg.metrics.len());
    for spec in &cfg.metrics {
        let name = spec.name();
        let start = Instant::now();
        let scored = score_metric(spec, &dataset, cfg)?;
        let seconds = start.elapsed().as_secs_f64();
        let by_id: BTreeMap<String, f64> = dataset
            .records
            .iter()
            .map(|r| r.id.clone())
            .zip(scored.scores.iter().copied())
            .collect();
        let correlation = correlate_partitioned(&dataset, &by_id, &norm).map_err(|source| ReportError::Stats {
            metric: name.clone(),
            source,
        })?;
        metrics.push(MetricResult {
            spec: spec.clone(),
            scores: MetricVector {
                metric: name,
                scores: scored.scores,
            },
            correlation,
            seconds,
            model_id: scored.model_id,
        });
    }
    Ok(ReportBundle {
        dataset,
        normalization: cfg.normalization,
        idf: cfg.idf,
        seed: cfg.seed,
        partitions,
        metrics,
    })
}

/// Loads the configured dataset and evaluates it (no files written).
pub fn evaluate(cfg: &RunConfig) -> Result<ReportBundle, ReportError> {
    cfg.validate()?;
    let path = cfg
        .dataset
        .as_ref()
        .ok_or_else(|| ReportError::Config("no dataset configured".into()))?;
    let format = match cfg.format {
        Some(f) => f,
        None => DatasetFormat::from_path(path)
            .ok_or_else(|| ReportError::Config(format!("cannot infer format of {}", path.display())))?,
    };
    evaluate_dataset(load_dataset(path, format)?, cfg)
}

/// [`evaluate`] and write the bundle into the configured output directory.
pub fn run(cfg: &RunConfig) -> Result<ReportBundle, ReportError> {
    let out = cfg
        .output_dir
        .clone()
        .ok_or_else(|| ReportError::Config("no output_dir configured".into()))?;
    let bundle = evaluate(cfg)?;
    bundle.write(&out)?;
    Ok(bundle)
}

/// Fixed four decimals; negative zero prints as zero.
pub fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn outcome_cells(o: &PartitionOutcome) -> [String; 3] {
    match o {
        PartitionOutcome::Triple(t) => [fmt4(t.pearson_r), fmt4(t.spearman_rho), fmt4(t.kendall_tau)],
        PartitionOutcome::Degenerate { reason, .. } => [0, 1, 2].map(|_| reason.as_str().to_owned()),
    }
}

#[derive(Serialize)]
struct PartitionInfo {
    records: usize,
    labeled: usize,
}

impl ReportBundle {
    pub fn metric(&self, name: &str) -> Option<&MetricResult> {
        self.metrics.iter().find(|m| m.scores.metric == name)
    }

    pub fn correlations_csv(&self) -> String {
        let mut s = String::from("metric");
        for p in PartitionKey::ORDER {
            for stat in ["r", "rho", "tau"] {
                let _ = write!(s, ",{}_{stat}", p.as_str());
            }
        }
        s.push('\n');
        for m in &self.metrics {
            s.push_str(&m.scores.metric);
            for p in PartitionKey::ORDER {
                for cell in outcome_cells(&m.correlation.outcomes[&p]) {
                    s.push(',');
                    s.push_str(&cell);
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn scores_ndjson(&self) -> String {
        let mut s = String::new();
        for (i, r) in self.dataset.records.iter().enumerate() {
            let mut row = Map::new();
            row.insert("id".into(), json!(r.id));
            row.insert("label".into(), json!(r.label.map(|l| l.value())));
            row.insert("partition".into(), json!(self.partitions[i].as_str()));
            for m in &self.metrics {
                row.insert(m.scores.metric.clone(), json!(m.scores.scores[i]));
            }
            s.push_str(&Value::Object(row).to_string());
            s.push('\n');
        }
        s
    }

    /// Per metric and label, counts in [`HISTOGRAM_BINS`] equal bins over
    /// `[min(0, lowest labeled score), 1]`. The last bin is closed.
    pub fn histogram_csv(&self) -> String {
        let mut s = String::from("metric,label,bin,lo,hi,count\n");
        let labeled: Vec<(usize, u8)> = self
            .dataset
            .records
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.label.map(|l| (i, l.value())))
            .collect();
        for m in &self.metrics {
            let scores = &m.scores.scores;
            let lo = labeled.iter().map(|&(i, _)| scores[i]).fold(0.0, f64::min);
            let width = (1.0 - lo) / HISTOGRAM_BINS as f64;
            for label in 0..=2u8 {
                let mut counts = [0usize; HISTOGRAM_BINS];
                for &(i, l) in &labeled {
                    if l == label {
                        let b = ((scores[i] - lo) / width).floor();
                        counts[(b.max(0.0) as usize).min(HISTOGRAM_BINS - 1)] += 1;
                    }
                }
                for (b, c) in counts.iter().enumerate() {
                    let blo = lo + width * b as f64;
                    let bhi = if b + 1 == HISTOGRAM_BINS { 1.0 } else { lo + width * (b + 1) as f64 };
                    let _ = writeln!(s, "{},{label},{b},{},{},{c}", m.scores.metric, fmt4(blo), fmt4(bhi));
                }
            }
        }
        s
    }

    /// Wall-clock seconds per metric, in config order.
    pub fn timings_csv(&self) -> String {
        let mut s = String::from("metric,seconds,records\n");
        for m in &self.metrics {
            let _ = writeln!(s, "{},{},{}", m.scores.metric, fmt4(m.seconds), m.scores.scores.len());
        }
        s
    }

    pub fn run_info_json(&self) -> String {
        let mut parts = Map::new();
        for p in PartitionKey::ORDER {
            let member = |i: usize| p == PartitionKey::All || self.partitions[i] == p;
            let records = (0..self.dataset.len()).filter(|&i| member(i)).count();
            let labeled = self
                .dataset
                .records
                .iter()
                .enumerate()
                .filter(|(i, r)| member(*i) && r.label.is_some())
                .count();
            parts.insert(p.as_str().into(), json!(PartitionInfo { records, labeled }));
        }
        let metrics: Vec<Value> = self
            .metrics
            .iter()
            .map(|m| json!({"name": m.scores.metric, "kind": m.spec.kind.name(), "model": m.model_id}))
            .collect();
        let unlabeled = self.dataset.records.iter().filter(|r| r.label.is_none()).count();
        let info = json!({
            "dataset": self.dataset.name,
            "records": self.dataset.len(),
            "lang": self.dataset.lang.as_str(),
            "normalization": self.normalization.as_str(),
            "idf": self.idf,
            "meteor_variant": METEOR_VARIANT,
            "seed": self.seed,
            "partitions": parts,
            "unlabeled": unlabeled,
            "metrics": metrics,
        });
        let mut s = serde_json::to_string_pretty(&info).expect("serializable run info");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> Result<(), ReportError> {
        let io = |path: PathBuf| move |source| ReportError::Io { path, source };
        fs::create_dir_all(dir).map_err(io(dir.to_path_buf()))?;
        for (name, body) in [
            ("correlations.csv", self.correlations_csv()),
            ("scores.ndjson", self.scores_ndjson()),
            ("histogram.csv", self.histogram_csv()),
            ("timings.csv", self.timings_csv()),
            ("run_info.json", self.run_info_json()),
        ] {
            let p = dir.join(name);
            fs::write(&p, body).map_err(io(p.clone()))?;
        }
        Ok(())
    }
}

/// Scores a single ad-hoc pair with every configured metric. Embedding
/// metrics look the texts up as record `id`.
pub fn score_texts(
    id: &str,
    a: &str,
    b: &str,
    lang: Lang,
    cfg: &RunConfig,
) -> Result<Vec<(String, f64)>, ReportError> {
    cfg.validate()?;
    let d = Dataset::new("pair", vec![EvalRecord::new(id, a, b).with_lang(lang)]);
    cfg.metrics
        .iter()
        .map(|spec| Ok((spec.name(), score_metric(spec, &d, cfg)?.scores[0])))
        .collect()
}

impl From<EmbError> for ReportError {
    fn from(e: EmbError) -> Self {
        ReportError::Metric {
            metric: "bertscore".into(),
            record: None,
            message: e.to_string(),
        }
    }
}

impl From<StatsError> for ReportError {
    fn from(source: StatsError) -> Self {
        ReportError::Stats {
            metric: "bertscore".into(),
            source,
        }
    }
}

/// BERTScore F1 correlations per layer from token files, one per layer.
/// With `idf`, weights come from the reference side of the first file.
pub fn layer_sweep_files(
    dataset: &Dataset,
    files: &[PathBuf],
    norm: &NormalizationProfile,
    idf: bool,
) -> Result<Vec<LayerSweepRow>, ReportError> {
    let perr = provider_err("bertscore");
    let mut by_layer: BTreeMap<u32, TokenEmbeddingFile> = BTreeMap::new();
    let mut order = Vec::new();
    for f in files {
        let tf = file_provider_load(f).and_then(|p| p.into_token()).map_err(&perr)?;
        let layer = tf.layer();
        if by_layer.insert(layer, tf).is_some() {
            return Err(ReportError::Config(format!("layer {layer} given twice")));
        }
        order.push(layer);
    }
    let table = match (idf, order.first()) {
        (true, Some(l)) => {
            let f = &by_layer[l];
            let refs = dataset
                .records
                .iter()
                .map(|r| f.get(&text_id(&r.id, Side::A)).map(|s| s.tokens.clone()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(&perr)?;
            Some(embmetrics::build_idf(f.manifest.model.clone(), refs)?)
        }
        _ => None,
    };
    embmetrics::layer_sweep(dataset, &order, norm, table.as_ref(), |layer, rec| {
        let Some(f) = by_layer.get(&layer) else { return Ok(None) };
        let a = f.get(&text_id(&rec.id, Side::A)).map_err(&perr)?;
        let b = f.get(&text_id(&rec.id, Side::B)).map_err(&perr)?;
        Ok(Some((a.clone(), b.clone())))
    })
}

pub fn layer_sweep_csv(rows: &[LayerSweepRow]) -> String {
    let mut s = String::from("layer,partition,r,rho,tau,n\n");
    for row in rows {
        let [r, rho, tau] = outcome_cells(&row.outcome);
        let _ = writeln!(s, "{},{},{r},{rho},{tau},{}", row.layer, row.partition, row.outcome.n());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(metrics: &str) -> RunConfig {
        RunConfig::parse(&format!("metrics = {metrics}\n"), "").unwrap()
    }

    fn two_records() -> Dataset {
        Dataset::new(
            "t",
            vec![
                EvalRecord::new("1", "National Football League", "the NFL").with_label(2),
                EvalRecord::new("2", "Old John Feather Merchant", "John Feather").with_label(1),
            ],
        )
    }

    #[test]
    fn tiny_dataset_gives_insufficient_markers() {
        let b = evaluate_dataset(two_records(), &cfg("em,f1,bleu,rouge_l")).unwrap();
        let csv = b.correlations_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(
            lines[0],
            "metric,f1_zero_r,f1_zero_rho,f1_zero_tau,f1_nonzero_r,f1_nonzero_rho,f1_nonzero_tau,all_r,all_rho,all_tau"
        );
        for l in &lines[1..] {
            assert!(l.contains("InsufficientData"), "{l}");
        }
    }

    #[test]
    fn nfl_pair_scores_zero_overlap() {
        let out = score_texts("x", "National Football League", "the NFL", Lang::En, &cfg("em,f1")).unwrap();
        assert_eq!(out, [("em".to_owned(), 0.0), ("f1".to_owned(), 0.0)]);
    }

    #[test]
    fn meteor_on_german_is_an_annotated_error() {
        let d = Dataset::new("g", vec![EvalRecord::new("g1", "Haus", "das Haus").with_lang(Lang::De)]);
        match evaluate_dataset(d, &cfg("meteor")) {
            Err(e @ ReportError::Metric { .. }) => {
                assert_eq!(e.metric(), Some("meteor"));
                assert_eq!(e.record(), Some("g1"));
                assert!(!e.is_provider());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_text_scores_zero() {
        // "the" vs "a" both normalize to nothing under English article removal
        let d = Dataset::new("e", vec![EvalRecord::new("e1", "the cat", "a")]);
        let b = evaluate_dataset(d, &cfg("bleu")).unwrap();
        assert_eq!(b.metrics[0].scores.scores, [0.0]);
    }

    #[test]
    fn histogram_layout() {
        let b = evaluate_dataset(two_records(), &cfg("f1")).unwrap();
        let h = b.histogram_csv();
        assert_eq!(h.lines().count(), 1 + 3 * HISTOGRAM_BINS);
        let total: usize = h.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
        assert_eq!(total, 2);
        assert!(h.contains("f1,0,0,0.0000,0.0500,0\n"));
        assert!(h.contains("f1,2,19,0.9500,1.0000,0\n"));
    }

    #[test]
    fn timings_follow_config_order() {
        let b = evaluate_dataset(two_records(), &cfg("rouge_l,em,f1")).unwrap();
        let names: Vec<_> = b.timings_csv().lines().skip(1).map(|l| l.split(',').next().unwrap().to_owned()).collect();
        assert_eq!(names, ["rouge_l", "em", "f1"]);
    }

    #[test]
    fn scores_keep_config_order() {
        let b = evaluate_dataset(two_records(), &cfg("f1,em")).unwrap();
        let first = b.scores_ndjson().lines().next().unwrap().to_owned();
        assert!(first.starts_with("{\"id\":\"1\",\"label\":2,\"partition\":\"f1_zero\",\"f1\":0.0,\"em\":0.0}"), "{first}");
    }

    #[test]
    fn fmt4_has_no_negative_zero() {
        assert_eq!(fmt4(-1e-9), "0.0000");
        assert_eq!(fmt4(0.71654), "0.7165");
    }
}
