//! Labeled answer-pair datasets: loading, validation, deduplication, lexical
//! overlap partitioning, number ablations and summary statistics.

use crate::lexmetrics::{token_f1, Lang, NormalizationProfile};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("row {row}: parse error: {message}")]
    Parse { row: usize, message: String },
    #[error("row {row}: schema error: {message}")]
    Schema { row: usize, message: String },
    #[error("record `{0}` has no label")]
    UnlabeledRecord(String),
    #[error("dataset is empty")]
    EmptyDataset,
}

/// Human similarity judgement: 0 dissimilar, 1 somewhat similar, 2 same meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Label(u8);

impl Label {
    pub fn new(v: i64) -> Option<Label> {
        (0..=2).contains(&v).then_some(Label(v as u8))
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl TryFrom<i64> for Label {
    type Error = String;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        Label::new(v).ok_or_else(|| format!("label {v} outside {{0,1,2}}"))
    }
}

impl From<Label> for u8 {
    fn from(l: Label) -> u8 {
        l.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub id: String,
    pub question: Option<String>,
    /// Ground truth for NQ-open, first answer otherwise.
    pub answer_a: String,
    /// Prediction for NQ-open, second answer otherwise.
    pub answer_b: String,
    pub label: Option<Label>,
    pub lang: Lang,
    pub category: Option<String>,
}

impl EvalRecord {
    pub fn new(id: impl Into<String>, answer_a: impl Into<String>, answer_b: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            question: None,
            answer_a: answer_a.into(),
            answer_b: answer_b.into(),
            label: None,
            lang: Lang::En,
            category: None,
        }
    }

    pub fn with_label(mut self, label: u8) -> Self {
        self.label = Label::new(label.into());
        self
    }

    pub fn with_lang(mut self, lang: Lang) -> Self {
        self.lang = lang;
        self
    }

    pub fn profile(&self) -> NormalizationProfile {
        NormalizationProfile::for_lang(self.lang)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub lang: Lang,
    pub records: Vec<EvalRecord>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, records: Vec<EvalRecord>) -> Self {
        let lang = dominant_lang(&records);
        Self {
            name: name.into(),
            lang,
            records,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// A dataset with the same name and language holding `records`.
    pub fn with_records(&self, records: Vec<EvalRecord>) -> Self {
        Self {
            name: self.name.clone(),
            lang: self.lang,
            records,
        }
    }

    pub fn profile(&self) -> NormalizationProfile {
        NormalizationProfile::for_lang(self.lang)
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn write_ndjson(&self, path: &Path) -> Result<(), CorpusError> {
        let io = |source| CorpusError::Io {
            path: path.to_owned(),
            source,
        };
        let mut f = fs::File::create(path).map_err(io)?;
        f.write_all(self.to_ndjson().as_bytes()).map_err(io)
    }
}

fn dominant_lang(records: &[EvalRecord]) -> Lang {
    let de = records.iter().filter(|r| r.lang == Lang::De).count();
    if de * 2 > records.len() {
        Lang::De
    } else {
        Lang::En
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    Ndjson,
    Csv,
}

impl DatasetFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "ndjson" | "jsonl" | "json" => Some(DatasetFormat::Ndjson),
            "csv" => Some(DatasetFormat::Csv),
            _ => None,
        }
    }
}

impl FromStr for DatasetFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ndjson" | "jsonl" => Ok(DatasetFormat::Ndjson),
            "csv" => Ok(DatasetFormat::Csv),
            other => Err(format!("unknown dataset format `{other}`")),
        }
    }
}

// Every field optional so that a missing column is reported as a schema error
// rather than a parse error.
#[derive(Debug, Default, Deserialize)]
struct RawRecord {
    id: Option<String>,
    question: Option<String>,
    answer_a: Option<String>,
    answer_b: Option<String>,
    label: Option<serde_json::Value>,
    lang: Option<String>,
    category: Option<String>,
}

pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<Dataset, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_owned(),
        source,
    })?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_owned();
    parse_dataset(&name, &text, format)
}

pub fn parse_dataset(name: &str, text: &str, format: DatasetFormat) -> Result<Dataset, CorpusError> {
    let raw = match format {
        DatasetFormat::Ndjson => parse_ndjson_rows(text)?,
        DatasetFormat::Csv => parse_csv_rows(text)?,
    };
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(raw.len());
    for (row, r) in raw {
        let rec = validate_row(row, r)?;
        if !seen.insert(rec.id.clone()) {
            return Err(CorpusError::Schema {
                row,
                message: format!("duplicate id `{}`", rec.id),
            });
        }
        records.push(rec);
    }
    Ok(Dataset::new(name, records))
}

fn parse_ndjson_rows(text: &str) -> Result<Vec<(usize, RawRecord)>, CorpusError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str::<RawRecord>(line)
                .map(|r| (i + 1, r))
                .map_err(|e| CorpusError::Parse {
                    row: i + 1,
                    message: e.to_string(),
                })
        })
        .collect()
}

fn parse_csv_rows(text: &str) -> Result<Vec<(usize, RawRecord)>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Parse {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let cols = [
        col("id"),
        col("question"),
        col("answer_a"),
        col("answer_b"),
        col("label"),
        col("lang"),
        col("category"),
    ];
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        // header is row 1
        let row = i + 2;
        let rec = rec.map_err(|e| CorpusError::Parse {
            row,
            message: e.to_string(),
        })?;
        let get = |c: Option<usize>| -> Option<String> {
            c.and_then(|c| rec.get(c))
                .filter(|v| !v.is_empty())
                .map(str::to_owned)
        };
        let label = match get(cols[4]) {
            None => None,
            Some(v) => Some(serde_json::Value::from(v.trim().parse::<i64>().map_err(|_| {
                CorpusError::Parse {
                    row,
                    message: format!("label `{v}` is not an integer"),
                }
            })?)),
        };
        rows.push((
            row,
            RawRecord {
                id: get(cols[0]),
                question: get(cols[1]),
                answer_a: get(cols[2]),
                answer_b: get(cols[3]),
                label,
                lang: get(cols[5]),
                category: get(cols[6]),
            },
        ));
    }
    Ok(rows)
}

fn validate_row(row: usize, r: RawRecord) -> Result<EvalRecord, CorpusError> {
    let schema = |message: String| CorpusError::Schema { row, message };
    let id = r.id.ok_or_else(|| schema("missing field `id`".into()))?;
    let answer_a = r.answer_a.ok_or_else(|| schema("missing field `answer_a`".into()))?;
    let answer_b = r.answer_b.ok_or_else(|| schema("missing field `answer_b`".into()))?;
    let lang_tag = r.lang.ok_or_else(|| schema("missing field `lang`".into()))?;
    let lang: Lang = lang_tag.parse().map_err(schema)?;
    if answer_a.trim().is_empty() || answer_b.trim().is_empty() {
        return Err(schema("answers must be non-empty".into()));
    }
    let label = match r.label {
        None | Some(serde_json::Value::Null) => None,
        Some(serde_json::Value::Number(n)) => {
            let v = n
                .as_i64()
                .ok_or_else(|| schema(format!("label {n} is not an integer")))?;
            Some(Label::try_from(v).map_err(schema)?)
        }
        Some(other) => {
            return Err(CorpusError::Parse {
                row,
                message: format!("label must be an integer, got {other}"),
            })
        }
    };
    let profile = NormalizationProfile::for_lang(lang);
    if profile.tokens(&answer_a).is_empty() && profile.tokens(&answer_b).is_empty() {
        return Err(schema("both answers are empty after normalization".into()));
    }
    Ok(EvalRecord {
        id,
        question: r.question,
        answer_a,
        answer_b,
        label,
        lang,
        category: r.category,
    })
}

/// Drops later records whose normalized ordered `(answer_a, answer_b)` pair
/// was already seen. Returns the kept dataset and the number removed.
pub fn dedup(d: &Dataset) -> (Dataset, usize) {
    let mut seen = HashSet::new();
    let kept: Vec<EvalRecord> = d
        .records
        .iter()
        .filter(|r| {
            let p = r.profile();
            seen.insert((p.normalize(&r.answer_a), p.normalize(&r.answer_b)))
        })
        .cloned()
        .collect();
    let removed = d.len() - kept.len();
    (d.with_records(kept), removed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PartitionKey {
    #[serde(rename = "f1_zero")]
    F1Zero,
    #[serde(rename = "f1_nonzero")]
    F1NonZero,
    #[serde(rename = "all")]
    All,
}

impl PartitionKey {
    pub const ORDER: [PartitionKey; 3] = [PartitionKey::F1Zero, PartitionKey::F1NonZero, PartitionKey::All];

    pub fn as_str(self) -> &'static str {
        match self {
            PartitionKey::F1Zero => "f1_zero",
            PartitionKey::F1NonZero => "f1_nonzero",
            PartitionKey::All => "all",
        }
    }

    /// Overlap bucket of one record (never `All`).
    pub fn of(record: &EvalRecord, norm: &NormalizationProfile) -> PartitionKey {
        if token_f1(&record.answer_a, &record.answer_b, norm) == 0.0 {
            PartitionKey::F1Zero
        } else {
            PartitionKey::F1NonZero
        }
    }
}

impl fmt::Display for PartitionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Splits by token-F1 overlap. The map always holds all three keys; `All`
/// is the input unchanged.
pub fn partition(d: &Dataset, norm: &NormalizationProfile) -> BTreeMap<PartitionKey, Dataset> {
    let (zero, nonzero): (Vec<_>, Vec<_>) = d
        .records
        .iter()
        .cloned()
        .partition(|r| PartitionKey::of(r, norm) == PartitionKey::F1Zero);
    BTreeMap::from([
        (PartitionKey::F1Zero, d.with_records(zero)),
        (PartitionKey::F1NonZero, d.with_records(nonzero)),
        (PartitionKey::All, d.clone()),
    ])
}

/// Percentage of records carrying label 0, 1 and 2.
pub fn label_distribution(d: &Dataset) -> Result<[f64; 3], CorpusError> {
    if d.is_empty() {
        return Err(CorpusError::EmptyDataset);
    }
    let mut counts = [0usize; 3];
    for r in &d.records {
        let l = r
            .label
            .ok_or_else(|| CorpusError::UnlabeledRecord(r.id.clone()))?;
        counts[l.value() as usize] += 1;
    }
    let n = d.len() as f64;
    Ok(counts.map(|c| 100.0 * c as f64 / n))
}

/// Mean character count over both answers of every record.
pub fn avg_answer_length(d: &Dataset) -> Result<f64, CorpusError> {
    if d.is_empty() {
        return Err(CorpusError::EmptyDataset);
    }
    let total: usize = d
        .records
        .iter()
        .map(|r| r.answer_a.chars().count() + r.answer_b.chars().count())
        .sum();
    Ok(total as f64 / (2 * d.len()) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AblationMode {
    /// Remove records whose `answer_a` contains any decimal digit.
    DropRowsWithDigitInA,
    /// Delete digit-bearing tokens from both answers.
    StripDigitsBoth,
    /// Delete digit-bearing tokens from `answer_a` only.
    StripDigitsAOnly,
}

impl FromStr for AblationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drop_rows_with_digit_in_a" | "drop-rows-with-digit-in-a" => Ok(AblationMode::DropRowsWithDigitInA),
            "strip_digits_both" | "strip-digits-both" => Ok(AblationMode::StripDigitsBoth),
            "strip_digits_a_only" | "strip-digits-a-only" => Ok(AblationMode::StripDigitsAOnly),
            other => Err(format!("unknown ablation mode `{other}`")),
        }
    }
}

fn has_digit(s: &str) -> bool {
    s.chars().any(|c| c.is_ascii_digit())
}

/// Removes whitespace-separated tokens containing a digit.
pub fn strip_digit_tokens(s: &str) -> String {
    s.split_whitespace()
        .filter(|t| !has_digit(t))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn ablate_numbers(d: &Dataset, mode: AblationMode) -> Dataset {
    let records = d
        .records
        .iter()
        .filter_map(|r| match mode {
            AblationMode::DropRowsWithDigitInA => (!has_digit(&r.answer_a)).then(|| r.clone()),
            AblationMode::StripDigitsBoth | AblationMode::StripDigitsAOnly => {
                let mut out = r.clone();
                out.answer_a = strip_digit_tokens(&r.answer_a);
                if mode == AblationMode::StripDigitsBoth {
                    out.answer_b = strip_digit_tokens(&r.answer_b);
                }
                (!out.answer_a.is_empty() && !out.answer_b.is_empty()).then_some(out)
            }
        })
        .collect();
    d.with_records(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(id: &str, a: &str, b: &str, label: u8) -> EvalRecord {
        EvalRecord::new(id, a, b).with_label(label)
    }

    #[test]
    fn loads_single_ndjson_line() {
        let d = parse_dataset(
            "t",
            r#"{"id":"1","question":null,"answer_a":"x","answer_b":"y","label":2,"lang":"en","category":null}"#,
            DatasetFormat::Ndjson,
        )
        .unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.records[0].label, Label::new(2));
    }

    #[test]
    fn rejects_label_out_of_range() {
        let err = parse_dataset(
            "t",
            r#"{"id":"1","answer_a":"x","answer_b":"y","label":3,"lang":"en"}"#,
            DatasetFormat::Ndjson,
        )
        .unwrap_err();
        assert!(matches!(err, CorpusError::Schema { row: 1, .. }), "{err}");
    }

    #[test]
    fn malformed_row_reports_row_number() {
        let text = "{\"id\":\"1\",\"answer_a\":\"x\",\"answer_b\":\"y\",\"lang\":\"en\"}\n{oops\n";
        let err = parse_dataset("t", text, DatasetFormat::Ndjson).unwrap_err();
        assert!(matches!(err, CorpusError::Parse { row: 2, .. }), "{err}");
    }

    #[test]
    fn missing_field_is_schema_error() {
        let err = parse_dataset("t", r#"{"id":"1","answer_a":"x","lang":"en"}"#, DatasetFormat::Ndjson)
            .unwrap_err();
        assert!(matches!(err, CorpusError::Schema { .. }));
    }

    #[test]
    fn rejects_duplicate_ids_and_empty_answers() {
        let dup = "{\"id\":\"1\",\"answer_a\":\"x\",\"answer_b\":\"y\",\"lang\":\"en\"}\n\
                   {\"id\":\"1\",\"answer_a\":\"z\",\"answer_b\":\"y\",\"lang\":\"en\"}";
        assert!(matches!(
            parse_dataset("t", dup, DatasetFormat::Ndjson),
            Err(CorpusError::Schema { row: 2, .. })
        ));
        let blank = r#"{"id":"1","answer_a":"  ","answer_b":"y","lang":"en"}"#;
        assert!(parse_dataset("t", blank, DatasetFormat::Ndjson).is_err());
        let both_articles = r#"{"id":"1","answer_a":"The","answer_b":"a","lang":"en"}"#;
        assert!(parse_dataset("t", both_articles, DatasetFormat::Ndjson).is_err());
    }

    #[test]
    fn loads_csv_with_header() {
        let text = "id,question,answer_a,answer_b,label,lang,category\n\
                    q1,Who?,\"Smith, John\",John Smith,2,en,\n\
                    q2,,x,y,,de,alias\n";
        let d = parse_dataset("t", text, DatasetFormat::Csv).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.records[0].answer_a, "Smith, John");
        assert_eq!(d.records[1].label, None);
        assert_eq!(d.records[1].lang, Lang::De);
        assert_eq!(d.records[1].category.as_deref(), Some("alias"));
        let bad = "id,answer_a,answer_b,label,lang\nq1,x,y,7,en\n";
        assert!(matches!(
            parse_dataset("t", bad, DatasetFormat::Csv),
            Err(CorpusError::Schema { row: 2, .. })
        ));
    }

    #[test]
    fn dedup_examples() {
        let d = Dataset::new(
            "t",
            vec![rec("1", "Paris", "paris!", 2), rec("2", "paris", "Paris", 1), rec("3", "Paris", "France", 0)],
        );
        let (out, removed) = dedup(&d);
        assert_eq!(removed, 1);
        assert_eq!(out.records.iter().map(|r| r.id.as_str()).collect::<Vec<_>>(), ["1", "3"]);
        let (_, again) = dedup(&out);
        assert_eq!(again, 0);
        assert_eq!(dedup(&Dataset::new("e", vec![])).1, 0);
    }

    #[test]
    fn dedup_key_is_ordered() {
        let d = Dataset::new("t", vec![rec("1", "a x", "y", 0), rec("2", "y", "a x", 0)]);
        assert_eq!(dedup(&d).1, 0);
    }

    #[test]
    fn partition_examples() {
        let d = Dataset::new(
            "t",
            vec![
                rec("1", "National Football League", "the NFL", 2),
                rec("2", "Barack Obama", "Barack Obama", 2),
            ],
        );
        let parts = partition(&d, &NormalizationProfile::english());
        assert_eq!(parts[&PartitionKey::F1Zero].records[0].id, "1");
        assert_eq!(parts[&PartitionKey::F1NonZero].records[0].id, "2");
        assert_eq!(parts[&PartitionKey::All].len(), 2);
    }

    #[test]
    fn label_distribution_examples() {
        let d = Dataset::new("t", vec![rec("1", "x", "y", 0)]);
        assert_eq!(label_distribution(&d).unwrap(), [100.0, 0.0, 0.0]);
        let unlabeled = Dataset::new("t", vec![EvalRecord::new("1", "x", "y")]);
        assert!(matches!(label_distribution(&unlabeled), Err(CorpusError::UnlabeledRecord(_))));
    }

    #[test]
    fn avg_answer_length_examples() {
        let d = Dataset::new("t", vec![rec("1", "ab", "abcd", 0)]);
        assert_eq!(avg_answer_length(&d).unwrap(), 3.0);
        assert!(matches!(avg_answer_length(&Dataset::new("e", vec![])), Err(CorpusError::EmptyDataset)));
    }

    fn ablation_fixture() -> Dataset {
        Dataset::new(
            "t",
            vec![
                rec("1", "born 1945", "1945", 0),
                rec("2", "born 1945", "in 1945", 1),
                rec("3", "Old John Feather Merchant", "1945", 2),
            ],
        )
    }

    #[test]
    fn ablate_drop_rows() {
        let out = ablate_numbers(&ablation_fixture(), AblationMode::DropRowsWithDigitInA);
        assert_eq!(out.records.iter().map(|r| r.id.as_str()).collect::<Vec<_>>(), ["3"]);
    }

    #[test]
    fn ablate_strip_both() {
        let out = ablate_numbers(&ablation_fixture(), AblationMode::StripDigitsBoth);
        // 1: ("born", "") dropped; 2: ("born", "in"); 3: b empties, dropped
        assert_eq!(out.len(), 1);
        assert_eq!(out.records[0].id, "2");
        assert_eq!((out.records[0].answer_a.as_str(), out.records[0].answer_b.as_str()), ("born", "in"));
    }

    #[test]
    fn ablate_strip_a_only() {
        let out = ablate_numbers(&ablation_fixture(), AblationMode::StripDigitsAOnly);
        let got: Vec<_> = out
            .records
            .iter()
            .map(|r| (r.id.as_str(), r.answer_a.as_str(), r.answer_b.as_str()))
            .collect();
        assert_eq!(
            got,
            [
                ("1", "born", "1945"),
                ("2", "born", "in 1945"),
                ("3", "Old John Feather Merchant", "1945")
            ]
        );
    }

    fn arb_record() -> impl Strategy<Value = EvalRecord> {
        (
            "[a-z]{1,3}( [a-z0-9]{1,3}){0,2}",
            "[a-z]{1,3}( [a-z0-9]{1,3}){0,2}",
            prop::option::of(0u8..3),
            prop::option::of("[A-Za-z ]{0,8}"),
        )
            .prop_map(|(a, b, l, q)| {
                let mut r = EvalRecord::new("", a, b);
                r.label = l.and_then(|l| Label::new(l.into()));
                r.question = q;
                r
            })
            .prop_filter("both answers normalize empty", |r| {
                let p = NormalizationProfile::english();
                !(p.tokens(&r.answer_a).is_empty() && p.tokens(&r.answer_b).is_empty())
            })
    }

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        prop::collection::vec(arb_record(), 0..30).prop_map(|mut rs| {
            for (i, r) in rs.iter_mut().enumerate() {
                r.id = format!("r{i}");
            }
            Dataset::new("prop", rs)
        })
    }

    proptest! {
        #[test]
        fn partition_is_exhaustive_and_exclusive(d in arb_dataset()) {
            let parts = partition(&d, &NormalizationProfile::english());
            let zero = &parts[&PartitionKey::F1Zero];
            let nonzero = &parts[&PartitionKey::F1NonZero];
            prop_assert_eq!(zero.len() + nonzero.len(), d.len());
            let ids: HashSet<&str> = zero.records.iter().chain(&nonzero.records).map(|r| r.id.as_str()).collect();
            prop_assert_eq!(ids.len(), d.len());
        }

        #[test]
        fn dedup_is_idempotent(d in arb_dataset()) {
            let (once, removed) = dedup(&d);
            prop_assert_eq!(once.len() + removed, d.len());
            prop_assert_eq!(dedup(&once).1, 0);
        }

        #[test]
        fn drop_mode_leaves_no_digits_in_a(d in arb_dataset()) {
            let out = ablate_numbers(&d, AblationMode::DropRowsWithDigitInA);
            prop_assert!(out.records.iter().all(|r| !has_digit(&r.answer_a)));
        }

        #[test]
        fn ndjson_round_trips(d in arb_dataset()) {
            let back = parse_dataset("prop", &d.to_ndjson(), DatasetFormat::Ndjson).unwrap();
            prop_assert_eq!(back, d);
        }
    }
}
