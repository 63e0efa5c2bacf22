use super::ReportError;
use crate::corpus::DatasetFormat;
use crate::lexmetrics::{Lang, LexicalMetric, NormalizationProfile};
use crate::providers::HttpConfig;
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Lexical(LexicalMetric),
    BiEncoder,
    BertScore,
    Sas,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Lexical(m) => m.name(),
            MetricKind::BiEncoder => "bi_encoder",
            MetricKind::BertScore => "bertscore",
            MetricKind::Sas => "sas",
        }
    }

    pub fn needs_provider(self) -> bool {
        !matches!(self, MetricKind::Lexical(_))
    }
}

/// A metric as listed in a config, e.g. `f1` or `bertscore@layer2`. The
/// label after `@` distinguishes several runs of one kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub label: Option<String>,
}

impl MetricSpec {
    pub fn name(&self) -> String {
        match &self.label {
            Some(l) => format!("{}@{l}", self.kind.name()),
            None => self.kind.name().to_owned(),
        }
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for MetricSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, label) = match s.split_once('@') {
            Some((k, l)) if !l.is_empty() && !l.contains([',', '=', '"']) => (k, Some(l.to_owned())),
            Some(_) => return Err(format!("bad metric label in `{s}`")),
            None => (s, None),
        };
        let kind = match kind {
            "bi_encoder" => MetricKind::BiEncoder,
            "bertscore" => MetricKind::BertScore,
            "sas" => MetricKind::Sas,
            other => MetricKind::Lexical(
                other
                    .parse()
                    .map_err(|_| format!("unknown metric `{other}`"))?,
            ),
        };
        Ok(MetricSpec { kind, label })
    }
}

pub fn parse_metric_list(s: &str) -> Result<Vec<MetricSpec>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|m| !m.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormChoice {
    /// Each record's own language profile.
    Auto,
    Fixed(Lang),
}

impl NormChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            NormChoice::Auto => "auto",
            NormChoice::Fixed(l) => l.as_str(),
        }
    }

    pub fn profile_for(self, lang: Lang) -> NormalizationProfile {
        match self {
            NormChoice::Auto => NormalizationProfile::for_lang(lang),
            NormChoice::Fixed(l) => NormalizationProfile::for_lang(l),
        }
    }
}

impl FromStr for NormChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(NormChoice::Auto),
            other => other
                .parse()
                .map(NormChoice::Fixed)
                .map_err(|_| format!("unknown normalization `{other}` (auto, en, de)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    File(PathBuf),
    Endpoint(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpSettings {
    pub max_batch: usize,
    pub max_in_flight: usize,
    pub max_retries: u32,
    pub backoff_ms: u64,
    pub timeout_ms: u64,
}

impl Default for HttpSettings {
    fn default() -> Self {
        let d = HttpConfig::new("");
        Self {
            max_batch: d.max_batch,
            max_in_flight: d.max_in_flight,
            max_retries: d.max_retries,
            backoff_ms: d.initial_backoff.as_millis() as u64,
            timeout_ms: d.timeout.as_millis() as u64,
        }
    }
}

impl HttpSettings {
    pub fn config(&self, endpoint: &str, layer: u32) -> HttpConfig {
        HttpConfig {
            endpoint: endpoint.to_owned(),
            max_batch: self.max_batch,
            max_in_flight: self.max_in_flight,
            max_retries: self.max_retries,
            initial_backoff: Duration::from_millis(self.backoff_ms),
            timeout: Duration::from_millis(self.timeout_ms),
            layer,
        }
    }
}

/// Evaluation run settings. Read from a flat `key = value` file (`#` starts
/// a comment line); relative paths resolve against the file's directory.
///
/// Keys: `dataset`, `format`, `normalization`, `metrics`, `idf`,
/// `output_dir`, `seed`, `provider.<metric>`, `endpoint.<metric>`,
/// `layer.<metric>`, `http.max_batch`, `http.max_in_flight`,
/// `http.max_retries`, `http.backoff_ms`, `http.timeout_ms`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub format: Option<DatasetFormat>,
    pub normalization: NormChoice,
    pub metrics: Vec<MetricSpec>,
    pub bindings: BTreeMap<String, Binding>,
    /// Token layer requested from endpoints, per metric name.
    pub layers: BTreeMap<String, u32>,
    pub http: HttpSettings,
    pub idf: bool,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            format: None,
            normalization: NormChoice::Auto,
            metrics: Vec::new(),
            bindings: BTreeMap::new(),
            layers: BTreeMap::new(),
            http: HttpSettings::default(),
            idf: false,
            output_dir: None,
            seed: 0,
            base_dir: PathBuf::new(),
        }
    }
}

/// `(line, key, value)` triples of a flat config text.
pub fn parse_kv(text: &str) -> Result<Vec<(usize, String, String)>, ReportError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ReportError::Config(format!("line {}: expected key = value", i + 1)))?;
        out.push((i + 1, k.trim().to_owned(), v.trim().to_owned()));
    }
    Ok(out)
}

pub fn parse_bool(s: &str) -> Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got `{s}`")),
    }
}

fn parse_num<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("expected a number, got `{s}`"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = fs::read_to_string(path).map_err(|source| ReportError::Io {
            path: path.to_owned(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, ReportError> {
        let mut cfg = Self::with_base_dir(base_dir);
        for (line, k, v) in parse_kv(text)? {
            cfg.set(&k, &v)
                .map_err(|e| ReportError::Config(format!("line {line}: {e}")))?;
        }
        Ok(cfg)
    }

    /// Empty config whose relative paths resolve against `base_dir`.
    pub fn with_base_dir(base_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            base_dir: base_dir.into(),
            ..Default::default()
        }
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    fn path(&self, v: &str) -> PathBuf {
        let p = PathBuf::from(v);
        if p.is_absolute() {
            p
        } else {
            self.base_dir.join(p)
        }
    }

    /// Applies one setting. Command-line overrides go through here too, with
    /// paths taken relative to the working directory.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "dataset" => self.dataset = Some(self.path(value)),
            "format" => self.format = Some(value.parse()?),
            "normalization" => self.normalization = value.parse()?,
            "metrics" => self.metrics = parse_metric_list(value)?,
            "idf" => self.idf = parse_bool(value)?,
            "output_dir" => self.output_dir = Some(self.path(value)),
            "seed" => self.seed = parse_num(value)?,
            "http.max_batch" => self.http.max_batch = parse_num(value)?,
            "http.max_in_flight" => self.http.max_in_flight = parse_num(value)?,
            "http.max_retries" => self.http.max_retries = parse_num(value)?,
            "http.backoff_ms" => self.http.backoff_ms = parse_num(value)?,
            "http.timeout_ms" => self.http.timeout_ms = parse_num(value)?,
            _ => {
                if let Some(m) = key.strip_prefix("provider.") {
                    self.bindings.insert(m.to_owned(), Binding::File(self.path(value)));
                } else if let Some(m) = key.strip_prefix("endpoint.") {
                    self.bindings.insert(m.to_owned(), Binding::Endpoint(value.to_owned()));
                } else if let Some(m) = key.strip_prefix("layer.") {
                    self.layers.insert(m.to_owned(), parse_num(value)?);
                } else {
                    return Err(format!("unknown key `{key}`"));
                }
            }
        }
        Ok(())
    }

    /// Clears the base directory so later [`set`](Self::set) calls resolve
    /// paths against the working directory.
    pub fn with_cwd_paths(mut self) -> Self {
        self.base_dir = PathBuf::new();
        self
    }

    /// Checks metric names are unique and every embedding metric is bound
    /// (and no lexical metric is).
    pub fn validate(&self) -> Result<(), ReportError> {
        let err = |m: String| Err(ReportError::Config(m));
        if self.metrics.is_empty() {
            return err("no metrics configured".into());
        }
        let mut seen = std::collections::HashSet::new();
        for m in &self.metrics {
            let name = m.name();
            if !seen.insert(name.clone()) {
                return err(format!("metric `{name}` listed twice"));
            }
            match (m.kind.needs_provider(), self.bindings.contains_key(&name)) {
                (true, false) => return err(format!("metric `{name}` has no provider binding")),
                (false, true) => return err(format!("metric `{name}` does not take a provider")),
                _ => {}
            }
        }
        if let Some(extra) = self.bindings.keys().find(|k| !seen.contains(*k)) {
            return err(format!("binding for `{extra}` which is not in metrics"));
        }
        Ok(())
    }
}
