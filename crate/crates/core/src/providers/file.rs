use super::{
    Direction, PairRequest, PairScore, PairScoreProvider, ProviderError, ProviderKind, ProviderManifest,
    SentenceEmbeddingProvider, TextRequest, TokenEmbeddingProvider,
};
use crate::embmetrics::{SentenceEmbedding, TokenEmbeddingSet};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Serialize, Deserialize)]
struct TokenLine {
    text_id: String,
    model: String,
    layer: u32,
    tokens: Vec<String>,
    vectors: Vec<Vec<f32>>,
}

#[derive(Serialize, Deserialize)]
struct SentenceLine {
    text_id: String,
    model: String,
    vector: Vec<f32>,
}

/// `emb.ndjson` pairs with `emb.manifest.json`. Either path may be given.
pub fn manifest_path_for(path: &Path) -> (PathBuf, PathBuf) {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    if let Some(stem) = name.strip_suffix(".manifest.json") {
        (path.with_file_name(format!("{stem}.ndjson")), path.to_path_buf())
    } else {
        (path.to_path_buf(), path.with_extension("manifest.json"))
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ProviderError + '_ {
    move |source| ProviderError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone)]
pub struct TokenEmbeddingFile {
    pub manifest: ProviderManifest,
    index: HashMap<String, TokenEmbeddingSet>,
}

#[derive(Debug, Clone)]
pub struct SentenceEmbeddingFile {
    pub manifest: ProviderManifest,
    index: HashMap<String, SentenceEmbedding>,
}

#[derive(Debug, Clone)]
pub struct PairScoreFile {
    pub manifest: ProviderManifest,
    index: HashMap<(String, Direction), PairScore>,
}

#[derive(Debug, Clone)]
pub enum FileProvider {
    Token(TokenEmbeddingFile),
    Sentence(SentenceEmbeddingFile),
    Pair(PairScoreFile),
}

impl FileProvider {
    pub fn manifest(&self) -> &ProviderManifest {
        match self {
            FileProvider::Token(f) => &f.manifest,
            FileProvider::Sentence(f) => &f.manifest,
            FileProvider::Pair(f) => &f.manifest,
        }
    }

    pub fn kind(&self) -> ProviderKind {
        self.manifest().kind
    }

    fn wrong(&self, expected: ProviderKind) -> ProviderError {
        ProviderError::WrongKind {
            expected,
            found: self.kind(),
        }
    }

    pub fn into_token(self) -> Result<TokenEmbeddingFile, ProviderError> {
        match self {
            FileProvider::Token(f) => Ok(f),
            other => Err(other.wrong(ProviderKind::Token)),
        }
    }

    pub fn into_sentence(self) -> Result<SentenceEmbeddingFile, ProviderError> {
        match self {
            FileProvider::Sentence(f) => Ok(f),
            other => Err(other.wrong(ProviderKind::Sentence)),
        }
    }

    pub fn into_pair(self) -> Result<PairScoreFile, ProviderError> {
        match self {
            FileProvider::Pair(f) => Ok(f),
            other => Err(other.wrong(ProviderKind::Pair)),
        }
    }
}

fn parse_lines<T: DeserializeOwned>(path: &Path, text: &str) -> Result<Vec<(usize, T)>, ProviderError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map(|v| (i + 1, v))
                .map_err(|e| ProviderError::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: e.to_string(),
                })
        })
        .collect()
}

/// Loads an interchange file and its manifest, verifying hash, counts,
/// model and dimensions. Lookups afterwards never touch the filesystem.
pub fn file_provider_load(path: impl AsRef<Path>) -> Result<FileProvider, ProviderError> {
    let (data_path, manifest_path) = manifest_path_for(path.as_ref());
    if !manifest_path.is_file() {
        return Err(ProviderError::MissingManifest(manifest_path));
    }
    let manifest_text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
    let manifest: ProviderManifest =
        serde_json::from_str(&manifest_text).map_err(|e| ProviderError::Parse {
            path: manifest_path.clone(),
            line: e.line(),
            message: e.to_string(),
        })?;
    let bytes = fs::read(&data_path).map_err(io_err(&data_path))?;
    let actual = sha256_hex(&bytes);
    if !actual.eq_ignore_ascii_case(&manifest.sha256) {
        return Err(ProviderError::HashMismatch {
            path: data_path,
            expected: manifest.sha256.clone(),
            actual,
        });
    }
    let text = String::from_utf8(bytes).map_err(|e| ProviderError::Parse {
        path: data_path.clone(),
        line: 0,
        message: e.to_string(),
    })?;
    let p = data_path.as_path();
    let dup = |line: usize, id: &str| ProviderError::Parse {
        path: p.to_path_buf(),
        line,
        message: format!("duplicate key `{id}`"),
    };
    let model_check = |line: usize, model: &str| {
        if model == manifest.model {
            Ok(())
        } else {
            Err(ProviderError::ManifestMismatch(format!(
                "{}:{line}: model `{model}` but manifest says `{}`",
                p.display(),
                manifest.model
            )))
        }
    };
    let dim_check = |line: usize, d: usize| match manifest.dimension {
        Some(m) if m != d => Err(ProviderError::DimensionInconsistent(format!(
            "{}:{line}: dimension {d}, manifest says {m}",
            p.display()
        ))),
        _ => Ok(()),
    };

    let provider = match manifest.kind {
        ProviderKind::Token => {
            let layer = manifest.layer.ok_or_else(|| {
                ProviderError::ManifestMismatch("token manifest without layer".into())
            })?;
            let mut index = HashMap::new();
            let mut dim = None;
            for (line, rec) in parse_lines::<TokenLine>(p, &text)? {
                model_check(line, &rec.model)?;
                if rec.layer != layer {
                    return Err(ProviderError::ManifestMismatch(format!(
                        "{}:{line}: layer {} but manifest says {layer}",
                        p.display(),
                        rec.layer
                    )));
                }
                let set = TokenEmbeddingSet::new(rec.text_id, rec.model, rec.layer, rec.tokens, rec.vectors)?;
                let d = set.dimension();
                dim_check(line, d)?;
                if *dim.get_or_insert(d) != d {
                    return Err(ProviderError::DimensionInconsistent(format!(
                        "{}:{line}: dimension {d} after {}",
                        p.display(),
                        dim.unwrap()
                    )));
                }
                if index.contains_key(&set.text_id) {
                    return Err(dup(line, &set.text_id));
                }
                index.insert(set.text_id.clone(), set);
            }
            FileProvider::Token(TokenEmbeddingFile {
                manifest: manifest.clone(),
                index,
            })
        }
        ProviderKind::Sentence => {
            let mut index = HashMap::new();
            let mut dim = None;
            for (line, rec) in parse_lines::<SentenceLine>(p, &text)? {
                model_check(line, &rec.model)?;
                let e = SentenceEmbedding::new(rec.text_id, rec.model, rec.vector)?;
                let d = e.vector.len();
                dim_check(line, d)?;
                if *dim.get_or_insert(d) != d {
                    return Err(ProviderError::DimensionInconsistent(format!(
                        "{}:{line}: dimension {d} after {}",
                        p.display(),
                        dim.unwrap()
                    )));
                }
                if index.contains_key(&e.text_id) {
                    return Err(dup(line, &e.text_id));
                }
                index.insert(e.text_id.clone(), e);
            }
            FileProvider::Sentence(SentenceEmbeddingFile {
                manifest: manifest.clone(),
                index,
            })
        }
        ProviderKind::Pair => {
            let mut index = HashMap::new();
            for (line, rec) in parse_lines::<PairScore>(p, &text)? {
                model_check(line, &rec.model_id)?;
                if !(0.0..=1.0).contains(&rec.score) {
                    return Err(ProviderError::ScoreOutOfRange {
                        pair_id: rec.pair_id,
                        score: rec.score,
                    });
                }
                let key = (rec.pair_id.clone(), rec.direction);
                if index.contains_key(&key) {
                    return Err(dup(line, &format!("{}/{}", rec.pair_id, rec.direction)));
                }
                index.insert(key, rec);
            }
            FileProvider::Pair(PairScoreFile {
                manifest: manifest.clone(),
                index,
            })
        }
    };
    let count = match &provider {
        FileProvider::Token(f) => f.index.len(),
        FileProvider::Sentence(f) => f.index.len(),
        FileProvider::Pair(f) => f.index.len(),
    };
    if count != manifest.record_count {
        return Err(ProviderError::ManifestMismatch(format!(
            "{}: {count} records, manifest says {}",
            p.display(),
            manifest.record_count
        )));
    }
    Ok(provider)
}

impl TokenEmbeddingFile {
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn layer(&self) -> u32 {
        self.manifest.layer.unwrap_or_default()
    }

    pub fn get(&self, text_id: &str) -> Result<&TokenEmbeddingSet, ProviderError> {
        self.index
            .get(text_id)
            .ok_or_else(|| ProviderError::MissingEmbedding(text_id.to_owned()))
    }

    pub fn sets(&self) -> impl Iterator<Item = &TokenEmbeddingSet> {
        self.index.values()
    }
}

impl SentenceEmbeddingFile {
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn get(&self, text_id: &str) -> Result<&SentenceEmbedding, ProviderError> {
        self.index
            .get(text_id)
            .ok_or_else(|| ProviderError::MissingEmbedding(text_id.to_owned()))
    }
}

impl PairScoreFile {
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn get(&self, pair_id: &str, direction: Direction) -> Result<&PairScore, ProviderError> {
        self.index
            .get(&(pair_id.to_owned(), direction))
            .ok_or_else(|| ProviderError::MissingScore {
                pair_id: pair_id.to_owned(),
                direction,
            })
    }
}

impl TokenEmbeddingProvider for TokenEmbeddingFile {
    fn token_embeddings(&self, items: &[TextRequest<'_>]) -> Result<Vec<TokenEmbeddingSet>, ProviderError> {
        items.iter().map(|t| self.get(t.id).cloned()).collect()
    }
}

impl SentenceEmbeddingProvider for SentenceEmbeddingFile {
    fn sentence_embeddings(&self, items: &[TextRequest<'_>]) -> Result<Vec<SentenceEmbedding>, ProviderError> {
        items.iter().map(|t| self.get(t.id).cloned()).collect()
    }
}

impl PairScoreProvider for PairScoreFile {
    fn pair_scores(&self, pairs: &[PairRequest<'_>]) -> Result<Vec<PairScore>, ProviderError> {
        pairs.iter().map(|p| self.get(p.pair_id, p.direction).cloned()).collect()
    }
}

fn write_with_manifest<T: Serialize>(
    path: &Path,
    lines: &[T],
    mut manifest: ProviderManifest,
) -> Result<ProviderManifest, ProviderError> {
    let mut body = String::new();
    for l in lines {
        body.push_str(&serde_json::to_string(l).expect("serializable record"));
        body.push('\n');
    }
    let (data_path, manifest_path) = manifest_path_for(path);
    fs::write(&data_path, &body).map_err(io_err(&data_path))?;
    manifest.sha256 = sha256_hex(body.as_bytes());
    manifest.record_count = lines.len();
    let mut m = serde_json::to_string_pretty(&manifest).expect("serializable manifest");
    m.push('\n');
    fs::write(&manifest_path, m).map_err(io_err(&manifest_path))?;
    Ok(manifest)
}

fn common_dimension(dims: impl Iterator<Item = usize>) -> Result<Option<usize>, ProviderError> {
    let mut out = None;
    for d in dims {
        if *out.get_or_insert(d) != d {
            return Err(ProviderError::DimensionInconsistent(format!(
                "dimension {d} after {}",
                out.unwrap()
            )));
        }
    }
    Ok(out)
}

/// Writes a token embedding file plus manifest. All sets must share model and layer.
pub fn write_token_embeddings(
    path: impl AsRef<Path>,
    model: &str,
    layer: u32,
    sets: &[TokenEmbeddingSet],
) -> Result<ProviderManifest, ProviderError> {
    let mut lines = Vec::with_capacity(sets.len());
    for s in sets {
        s.validate()?;
        if s.model_id != model || s.layer != layer {
            return Err(ProviderError::ManifestMismatch(format!(
                "`{}` is {}@{}, file is {model}@{layer}",
                s.text_id, s.model_id, s.layer
            )));
        }
        lines.push(TokenLine {
            text_id: s.text_id.clone(),
            model: s.model_id.clone(),
            layer: s.layer,
            tokens: s.tokens.clone(),
            vectors: s.vectors.clone(),
        });
    }
    let dimension = common_dimension(sets.iter().map(|s| s.dimension()))?;
    write_with_manifest(
        path.as_ref(),
        &lines,
        ProviderManifest {
            model: model.into(),
            kind: ProviderKind::Token,
            layer: Some(layer),
            dimension,
            record_count: 0,
            sha256: String::new(),
        },
    )
}

pub fn write_sentence_embeddings(
    path: impl AsRef<Path>,
    model: &str,
    embeddings: &[SentenceEmbedding],
) -> Result<ProviderManifest, ProviderError> {
    let mut lines = Vec::with_capacity(embeddings.len());
    for e in embeddings {
        if e.model_id != model {
            return Err(ProviderError::ManifestMismatch(format!(
                "`{}` is from {}, file is {model}",
                e.text_id, e.model_id
            )));
        }
        lines.push(SentenceLine {
            text_id: e.text_id.clone(),
            model: e.model_id.clone(),
            vector: e.vector.clone(),
        });
    }
    let dimension = common_dimension(embeddings.iter().map(|e| e.vector.len()))?;
    write_with_manifest(
        path.as_ref(),
        &lines,
        ProviderManifest {
            model: model.into(),
            kind: ProviderKind::Sentence,
            layer: None,
            dimension,
            record_count: 0,
            sha256: String::new(),
        },
    )
}

pub fn write_pair_scores(
    path: impl AsRef<Path>,
    model: &str,
    scores: &[PairScore],
) -> Result<ProviderManifest, ProviderError> {
    for s in scores {
        if s.model_id != model {
            return Err(ProviderError::ManifestMismatch(format!(
                "`{}` is from {}, file is {model}",
                s.pair_id, s.model_id
            )));
        }
        if !(0.0..=1.0).contains(&s.score) {
            return Err(ProviderError::ScoreOutOfRange {
                pair_id: s.pair_id.clone(),
                score: s.score,
            });
        }
    }
    write_with_manifest(
        path.as_ref(),
        scores,
        ProviderManifest {
            model: model.into(),
            kind: ProviderKind::Pair,
            layer: None,
            dimension: None,
            record_count: 0,
            sha256: String::new(),
        },
    )
}
