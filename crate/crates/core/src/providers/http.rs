use super::{
    PairRequest, PairScore, PairScoreProvider, ProviderError, SentenceEmbeddingProvider, TextRequest,
    TokenEmbeddingProvider,
};
use crate::embmetrics::{SentenceEmbedding, TokenEmbeddingSet};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

type Batch<T> = Result<Vec<T>, ProviderError>;

#[derive(Debug, Clone)]
pub struct HttpConfig {
    /// Base URL, e.g. `http://127.0.0.1:8080`.
    pub endpoint: String,
    pub max_batch: usize,
    pub max_in_flight: usize,
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub timeout: Duration,
    /// Layer requested in token mode.
    pub layer: u32,
}

impl HttpConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            max_batch: 32,
            max_in_flight: 4,
            max_retries: 3,
            initial_backoff: Duration::from_millis(100),
            timeout: Duration::from_secs(60),
            layer: 0,
        }
    }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: Vec<&'a str>,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    layer: Option<u32>,
}

#[derive(Deserialize)]
struct EmbedResponse<T> {
    model: String,
    dimension: usize,
    embeddings: Vec<T>,
}

#[derive(Deserialize)]
struct TokenEntry {
    tokens: Vec<String>,
    vectors: Vec<Vec<f32>>,
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    pairs: Vec<[&'a str; 2]>,
}

#[derive(Deserialize)]
struct ScoreResponse {
    model: String,
    scores: Vec<Option<f64>>,
}

#[derive(Deserialize)]
struct ErrorBody {
    error: String,
}

const EXCERPT: usize = 200;

pub struct HttpProvider {
    config: HttpConfig,
    client: reqwest::blocking::Client,
    retries: AtomicU64,
}

impl HttpProvider {
    pub fn new(config: HttpConfig) -> Result<Self, ProviderError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        Ok(Self {
            config: HttpConfig {
                max_batch: config.max_batch.max(1),
                max_in_flight: config.max_in_flight.max(1),
                ..config
            },
            client,
            retries: AtomicU64::new(0),
        })
    }

    pub fn config(&self) -> &HttpConfig {
        &self.config
    }

    /// Total retries performed since construction.
    pub fn retries(&self) -> u64 {
        self.retries.load(Ordering::Relaxed)
    }

    fn url(&self, route: &str) -> String {
        format!("{}/{route}", self.config.endpoint.trim_end_matches('/'))
    }

    fn post<B: Serialize, R: DeserializeOwned>(&self, route: &str, body: &B) -> Result<R, ProviderError> {
        let url = self.url(route);
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            let failure = match self.client.post(&url).json(body).send() {
                Ok(resp) => {
                    let status = resp.status();
                    let text = resp
                        .text()
                        .map_err(|e| ProviderError::Transport(e.to_string()))?;
                    if status.is_success() {
                        return serde_json::from_str(&text).map_err(|e| ProviderError::Parse {
                            path: url.clone().into(),
                            line: e.line(),
                            message: e.to_string(),
                        });
                    }
                    let body = serde_json::from_str::<ErrorBody>(&text)
                        .map(|b| b.error)
                        .unwrap_or(text);
                    let err = ProviderError::RemoteError {
                        status: status.as_u16(),
                        body: body.chars().take(EXCERPT).collect(),
                    };
                    if !(status.is_server_error() || status.as_u16() == 429) {
                        return Err(err);
                    }
                    err
                }
                Err(e) if e.is_timeout() => ProviderError::Timeout { attempts: attempt },
                Err(e) => ProviderError::Transport(e.to_string()),
            };
            if attempt > self.config.max_retries {
                return Err(failure);
            }
            self.retries.fetch_add(1, Ordering::Relaxed);
            std::thread::sleep(self.config.initial_backoff * 2u32.saturating_pow(attempt - 1));
        }
    }

    /// Runs `call` on each chunk with at most `max_in_flight` concurrent
    /// requests, then concatenates results in input order.
    fn batched<I: Sync, T: Send>(
        &self,
        items: &[I],
        call: impl Fn(&[I]) -> Result<Vec<T>, ProviderError> + Sync,
    ) -> Result<Vec<T>, ProviderError> {
        let chunks: Vec<&[I]> = items.chunks(self.config.max_batch).collect();
        let slots: Vec<Mutex<Option<Batch<T>>>> = chunks.iter().map(|_| Mutex::new(None)).collect();
        let next = AtomicUsize::new(0);
        let workers = self.config.max_in_flight.min(chunks.len());
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(chunk) = chunks.get(i) else { break };
                    let out = call(chunk);
                    let failed = out.is_err();
                    *slots[i].lock().unwrap() = Some(out);
                    if failed {
                        next.store(chunks.len(), Ordering::Relaxed);
                    }
                });
            }
        });
        let mut all = Vec::with_capacity(items.len());
        for (slot, chunk) in slots.into_iter().zip(&chunks) {
            match slot.into_inner().unwrap() {
                Some(Ok(v)) => {
                    if v.len() != chunk.len() {
                        return Err(ProviderError::RemoteError {
                            status: 200,
                            body: format!("{} results for {} inputs", v.len(), chunk.len()),
                        });
                    }
                    all.extend(v)
                }
                Some(Err(e)) => return Err(e),
                // skipped after an earlier failure; that error is returned first
                None => continue,
            }
        }
        Ok(all)
    }
}

fn check_dimension(model: &str, declared: usize, seen: usize, what: &str) -> Result<(), ProviderError> {
    if declared != seen {
        return Err(ProviderError::DimensionInconsistent(format!(
            "{model}: {what} has dimension {seen}, response declares {declared}"
        )));
    }
    Ok(())
}

impl TokenEmbeddingProvider for HttpProvider {
    fn token_embeddings(&self, items: &[TextRequest<'_>]) -> Result<Vec<TokenEmbeddingSet>, ProviderError> {
        let out = self.batched(items, |chunk| {
            let req = EmbedRequest {
                texts: chunk.iter().map(|t| t.text).collect(),
                mode: "token",
                layer: Some(self.config.layer),
            };
            let resp: EmbedResponse<TokenEntry> = self.post("embed", &req)?;
            chunk
                .iter()
                .zip(resp.embeddings)
                .map(|(t, e)| {
                    for v in &e.vectors {
                        check_dimension(&resp.model, resp.dimension, v.len(), t.id)?;
                    }
                    Ok(TokenEmbeddingSet::new(t.id, &resp.model, self.config.layer, e.tokens, e.vectors)?)
                })
                .collect()
        })?;
        same_model(out.iter().map(|s| s.model_id.as_str()))?;
        same_dimension(out.iter().map(|s| s.dimension()))?;
        Ok(out)
    }
}

impl SentenceEmbeddingProvider for HttpProvider {
    fn sentence_embeddings(&self, items: &[TextRequest<'_>]) -> Result<Vec<SentenceEmbedding>, ProviderError> {
        let out = self.batched(items, |chunk| {
            let req = EmbedRequest {
                texts: chunk.iter().map(|t| t.text).collect(),
                mode: "sentence",
                layer: None,
            };
            let resp: EmbedResponse<Vec<f32>> = self.post("embed", &req)?;
            chunk
                .iter()
                .zip(resp.embeddings)
                .map(|(t, v)| {
                    check_dimension(&resp.model, resp.dimension, v.len(), t.id)?;
                    Ok(SentenceEmbedding::new(t.id, &resp.model, v)?)
                })
                .collect()
        })?;
        same_model(out.iter().map(|s| s.model_id.as_str()))?;
        same_dimension(out.iter().map(|s| s.vector.len()))?;
        Ok(out)
    }
}

impl PairScoreProvider for HttpProvider {
    fn pair_scores(&self, pairs: &[PairRequest<'_>]) -> Result<Vec<PairScore>, ProviderError> {
        let out = self.batched(pairs, |chunk| {
            let req = ScoreRequest {
                pairs: chunk.iter().map(|p| [p.first, p.second]).collect(),
            };
            let resp: ScoreResponse = self.post("score-pairs", &req)?;
            chunk
                .iter()
                .zip(resp.scores)
                .map(|(p, s)| {
                    let score = s.ok_or_else(|| ProviderError::MissingScore {
                        pair_id: p.pair_id.to_owned(),
                        direction: p.direction,
                    })?;
                    if !(0.0..=1.0).contains(&score) {
                        return Err(ProviderError::ScoreOutOfRange {
                            pair_id: p.pair_id.to_owned(),
                            score,
                        });
                    }
                    Ok(PairScore {
                        pair_id: p.pair_id.to_owned(),
                        model_id: resp.model.clone(),
                        direction: p.direction,
                        score,
                    })
                })
                .collect()
        })?;
        same_model(out.iter().map(|s| s.model_id.as_str()))?;
        Ok(out)
    }
}

fn same_model<'a>(mut models: impl Iterator<Item = &'a str>) -> Result<(), ProviderError> {
    if let Some(first) = models.next() {
        if let Some(other) = models.find(|m| *m != first) {
            return Err(ProviderError::ManifestMismatch(format!(
                "responses from models `{first}` and `{other}`"
            )));
        }
    }
    Ok(())
}

fn same_dimension(mut dims: impl Iterator<Item = usize>) -> Result<(), ProviderError> {
    if let Some(first) = dims.next() {
        if let Some(other) = dims.find(|d| *d != first) {
            return Err(ProviderError::DimensionInconsistent(format!(
                "batches returned dimensions {first} and {other}"
            )));
        }
    }
    Ok(())
}
