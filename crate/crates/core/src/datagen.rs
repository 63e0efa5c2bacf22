//! Augmentation data: name pairs from a person dump (variant positives plus
//! randomly paired names labelled by a cross-encoder) and number pairs.

use crate::providers::{Direction, PairRequest, PairScoreProvider, ProviderError};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Identifies the shuffle procedure; recorded in every output's metadata.
pub const PRNG_NAME: &str = "chacha20(seed=u64-le,zero-padded)/fisher-yates/rejection-u64/v1";

pub const DEFAULT_MAX_VARIANTS: usize = 3;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("need at least 2 names, got {0}")]
    TooFewNames(usize),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("{0} is outside 0..=999999")]
    OutOfRange(u64),
    #[error("max_n must be at least 1")]
    InvalidMaxN,
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersonEntity {
    pub entity_id: String,
    pub canonical_name: String,
    pub variants: Vec<String>,
    pub nationality: String,
}

impl PersonEntity {
    /// Trims names, drops empty variants, duplicates and copies of the
    /// canonical name. `None` when the canonical name is blank.
    pub fn new(
        entity_id: impl Into<String>,
        canonical_name: &str,
        variants: impl IntoIterator<Item = impl AsRef<str>>,
        nationality: impl Into<String>,
    ) -> Option<Self> {
        let canonical = canonical_name.trim();
        if canonical.is_empty() {
            return None;
        }
        let mut seen = HashSet::from([canonical.to_owned()]);
        let variants = variants
            .into_iter()
            .map(|v| v.as_ref().trim().to_owned())
            .filter(|v| !v.is_empty() && seen.insert(v.clone()))
            .collect();
        Some(Self {
            entity_id: entity_id.into(),
            canonical_name: canonical.to_owned(),
            variants,
            nationality: nationality.into(),
        })
    }

    /// Canonical name followed by the variants.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.canonical_name.as_str()).chain(self.variants.iter().map(String::as_str))
    }
}

#[derive(Debug, Deserialize)]
struct PersonRow {
    entity_id: String,
    name: String,
    #[serde(default)]
    alternative_names: Option<String>,
    #[serde(default)]
    nationality: Option<String>,
}

impl PersonRow {
    fn into_entity(self, row: usize) -> Result<PersonEntity, DatagenError> {
        let alts = self.alternative_names.unwrap_or_default();
        PersonEntity::new(
            self.entity_id,
            &self.name,
            alts.split(';'),
            self.nationality.unwrap_or_default(),
        )
        .ok_or(DatagenError::Parse {
            row,
            message: "empty name".into(),
        })
    }
}

/// Person dump as CSV (header required) or NDJSON, chosen by extension
/// (`.csv` is CSV, anything else NDJSON).
pub fn load_persons(path: &Path) -> Result<Vec<PersonEntity>, DatagenError> {
    let text = fs::read_to_string(path).map_err(|source| DatagenError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if csv {
        parse_persons_csv(&text)
    } else {
        parse_persons_ndjson(&text)
    }
}

pub fn parse_persons_csv(text: &str) -> Result<Vec<PersonEntity>, DatagenError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize::<PersonRow>()
        .enumerate()
        .map(|(i, row)| {
            // header is row 1
            let row_no = i + 2;
            row.map_err(|e| DatagenError::Parse {
                row: row_no,
                message: e.to_string(),
            })?
            .into_entity(row_no)
        })
        .collect()
}

pub fn parse_persons_ndjson(text: &str) -> Result<Vec<PersonEntity>, DatagenError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str::<PersonRow>(l)
                .map_err(|e| DatagenError::Parse {
                    row: i + 1,
                    message: e.to_string(),
                })?
                .into_entity(i + 1)
        })
        .collect()
}

/// Entities of the given nationality (case-insensitive) with at most
/// `max_variants` alternative names.
pub fn filter_entities(entities: &[PersonEntity], nationality: &str, max_variants: usize) -> Vec<PersonEntity> {
    let want = nationality.trim().to_lowercase();
    entities
        .iter()
        .filter(|e| e.nationality.trim().to_lowercase() == want && e.variants.len() <= max_variants)
        .cloned()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSource {
    VariantPositive,
    RandomScored,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamePair {
    pub name_a: String,
    pub name_b: String,
    pub label: f64,
    pub source: PairSource,
}

/// All unordered pairs among each entity's names, lexicographically ordered
/// within the entity, labelled 1.
pub fn variant_pairs(entities: &[PersonEntity]) -> Vec<NamePair> {
    let mut out = Vec::new();
    for e in entities {
        let mut names: Vec<&str> = e.names().collect();
        names.sort_unstable();
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                out.push(NamePair {
                    name_a: names[i].to_owned(),
                    name_b: names[j].to_owned(),
                    label: 1.0,
                    source: PairSource::VariantPositive,
                });
            }
        }
    }
    out
}

fn rng_for(seed: u64) -> ChaCha20Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    ChaCha20Rng::from_seed(bytes)
}

/// Uniform index in `0..bound` by rejection sampling on raw 64-bit draws.
fn uniform_index(rng: &mut impl RngCore, bound: usize) -> usize {
    let bound = bound as u128;
    let zone = ((1u128 << 64) / bound) * bound;
    loop {
        let x = rng.next_u64() as u128;
        if x < zone {
            return (x % bound) as usize;
        }
    }
}

/// Fisher–Yates shuffle (high index down) seeded as described by [`PRNG_NAME`].
pub fn seeded_shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = rng_for(seed);
    for i in (1..items.len()).rev() {
        let j = uniform_index(&mut rng, i + 1);
        items.swap(i, j);
    }
}

/// Shuffles distinct names and pairs consecutive positions; an odd leftover
/// is dropped.
pub fn random_pairs(names: &[String], seed: u64) -> Result<Vec<(String, String)>, DatagenError> {
    if names.len() < 2 {
        return Err(DatagenError::TooFewNames(names.len()));
    }
    let mut seen = HashSet::new();
    if let Some(d) = names.iter().find(|n| !seen.insert(n.as_str())) {
        return Err(DatagenError::DuplicateName(d.clone()));
    }
    let mut shuffled = names.to_vec();
    seeded_shuffle(&mut shuffled, seed);
    Ok(shuffled
        .chunks_exact(2)
        .map(|c| (c[0].clone(), c[1].clone()))
        .collect())
}

pub fn random_pair_id(index: usize) -> String {
    format!("rand-{index}")
}

/// Labels pairs with raw provider scores. Pair `i` is requested as
/// `rand-{i}` in the ab direction.
pub fn score_pairs(
    pairs: &[(String, String)],
    provider: &dyn PairScoreProvider,
) -> Result<Vec<NamePair>, DatagenError> {
    Ok(score_pairs_with_model(pairs, provider)?.0)
}

fn score_pairs_with_model(
    pairs: &[(String, String)],
    provider: &dyn PairScoreProvider,
) -> Result<(Vec<NamePair>, Option<String>), DatagenError> {
    let ids: Vec<String> = (0..pairs.len()).map(random_pair_id).collect();
    let reqs: Vec<PairRequest> = pairs
        .iter()
        .zip(&ids)
        .map(|((a, b), id)| PairRequest {
            pair_id: id,
            first: a,
            second: b,
            direction: Direction::Ab,
        })
        .collect();
    let scores = provider.pair_scores(&reqs)?;
    let model = scores.first().map(|s| s.model_id.clone());
    let labelled = pairs
        .iter()
        .zip(&ids)
        .enumerate()
        .map(|(i, ((a, b), id))| {
            let s = scores
                .get(i)
                .filter(|s| &s.pair_id == id)
                .ok_or_else(|| ProviderError::MissingScore {
                    pair_id: id.clone(),
                    direction: Direction::Ab,
                })?;
            Ok(NamePair {
                name_a: a.clone(),
                name_b: b.clone(),
                label: s.score,
                source: PairSource::RandomScored,
            })
        })
        .collect::<Result<Vec<_>, DatagenError>>()?;
    Ok((labelled, model))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamesMetadata {
    pub seed: u64,
    pub prng: String,
    pub nationality: String,
    pub max_variants: usize,
    pub input_entities: usize,
    pub kept_entities: usize,
    pub variant_pairs: usize,
    pub random_names: usize,
    pub random_pairs: usize,
    pub total_pairs: usize,
    pub model_id: Option<String>,
}

/// Filter, variant positives, then shuffled canonical names paired and
/// scored. With no provider only the variant positives are produced.
pub fn names_dataset(
    entities: &[PersonEntity],
    nationality: &str,
    max_variants: usize,
    seed: u64,
    provider: Option<&dyn PairScoreProvider>,
) -> Result<(Vec<NamePair>, NamesMetadata), DatagenError> {
    let kept = filter_entities(entities, nationality, max_variants);
    let mut out = variant_pairs(&kept);
    let n_variant = out.len();
    let mut seen = HashSet::new();
    let names: Vec<String> = kept
        .iter()
        .map(|e| e.canonical_name.clone())
        .filter(|n| seen.insert(n.clone()))
        .collect();
    let mut model_id = None;
    let mut n_random = 0;
    if let Some(p) = provider {
        let pairs = random_pairs(&names, seed)?;
        let (scored, model) = score_pairs_with_model(&pairs, p)?;
        n_random = scored.len();
        model_id = model;
        out.extend(scored);
    }
    let meta = NamesMetadata {
        seed,
        prng: PRNG_NAME.into(),
        nationality: nationality.into(),
        max_variants,
        input_entities: entities.len(),
        kept_entities: kept.len(),
        variant_pairs: n_variant,
        random_names: names.len(),
        random_pairs: n_random,
        total_pairs: out.len(),
        model_id,
    };
    Ok((out, meta))
}

const ONES: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
];
const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

fn below_thousand(n: u64, out: &mut Vec<String>) {
    let (h, r) = (n / 100, n % 100);
    if h > 0 {
        out.push(ONES[h as usize].into());
        out.push("hundred".into());
    }
    if r == 0 {
        return;
    }
    if r < 20 {
        out.push(ONES[r as usize].into());
    } else if r % 10 == 0 {
        out.push(TENS[(r / 10) as usize].into());
    } else {
        out.push(format!("{}-{}", TENS[(r / 10) as usize], ONES[(r % 10) as usize]));
    }
}

/// English words for 0..=999,999: hyphenated tens, no "and".
pub fn number_to_words(n: u64) -> Result<String, DatagenError> {
    if n > 999_999 {
        return Err(DatagenError::OutOfRange(n));
    }
    if n == 0 {
        return Ok("zero".into());
    }
    let mut parts = Vec::new();
    let (th, rest) = (n / 1000, n % 1000);
    if th > 0 {
        below_thousand(th, &mut parts);
        parts.push("thousand".into());
    }
    below_thousand(rest, &mut parts);
    Ok(parts.join(" "))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NumberPair {
    pub text_a: String,
    pub text_b: String,
    pub label: u8,
}

/// For each n in 0..=max_n: (digits, words) and (words, digits) labelled 1,
/// then (n, n+1) and, for n > 0, (n, n-1) as digits labelled 0.
pub fn numbers_dataset(max_n: u64) -> Result<Vec<NumberPair>, DatagenError> {
    if max_n < 1 {
        return Err(DatagenError::InvalidMaxN);
    }
    let mut out = Vec::new();
    let pair = |a: String, b: String, label| NumberPair {
        text_a: a,
        text_b: b,
        label,
    };
    for n in 0..=max_n {
        let d = n.to_string();
        let w = number_to_words(n)?;
        out.push(pair(d.clone(), w.clone(), 1));
        out.push(pair(w, d.clone(), 1));
        out.push(pair(d.clone(), (n + 1).to_string(), 0));
        if n > 0 {
            out.push(pair(d, (n - 1).to_string(), 0));
        }
    }
    Ok(out)
}

pub fn to_ndjson<T: Serialize>(rows: &[T]) -> String {
    let mut s = String::new();
    for r in rows {
        s.push_str(&serde_json::to_string(r).expect("serializable row"));
        s.push('\n');
    }
    s
}

/// `pairs.ndjson` → `pairs.meta.json`.
pub fn metadata_path_for(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

pub fn write_outputs<T: Serialize, M: Serialize>(path: &Path, rows: &[T], meta: &M) -> Result<(), DatagenError> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| DatagenError::Io { path: p, source }
    };
    fs::write(path, to_ndjson(rows)).map_err(io(path))?;
    let mp = metadata_path_for(path);
    let mut m = serde_json::to_string_pretty(meta).expect("serializable metadata");
    m.push('\n');
    fs::write(&mp, m).map_err(io(&mp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::PairScore;
    use proptest::prelude::*;

    fn person(id: &str, name: &str, variants: &[&str], nat: &str) -> PersonEntity {
        PersonEntity::new(id, name, variants.iter().copied(), nat).unwrap()
    }

    #[test]
    fn entity_variants_exclude_canonical_and_duplicates() {
        let e = person("1", " Ann Lee ", &["Ann Lee", "A. Lee", "", "A. Lee"], "US");
        assert_eq!(e.canonical_name, "Ann Lee");
        assert_eq!(e.variants, ["A. Lee"]);
        assert!(PersonEntity::new("2", "  ", Vec::<&str>::new(), "US").is_none());
    }

    #[test]
    fn filter_rules() {
        let es = vec![
            person("five", "A", &["b", "c", "d", "e", "f"], "US"),
            person("zero", "B", &[], "us"),
            person("three", "C", &["x", "y", "z"], "US"),
            person("other", "D", &[], "DE"),
        ];
        let kept: Vec<_> = filter_entities(&es, "US", 3).into_iter().map(|e| e.entity_id).collect();
        assert_eq!(kept, ["zero", "three"]);
    }

    #[test]
    fn variant_pair_counts_and_order() {
        let one = person("1", "Lisa Marie Abato", &["Holly Ryder"], "US");
        let ps = variant_pairs(&[one]);
        assert_eq!(ps.len(), 1);
        assert_eq!((ps[0].name_a.as_str(), ps[0].name_b.as_str()), ("Holly Ryder", "Lisa Marie Abato"));
        assert_eq!(ps[0].label, 1.0);
        let two = person("2", "Gary A Labranche", &["Labranche Gary", "G. Labranche"], "US");
        let names: Vec<_> = variant_pairs(&[two]).into_iter().map(|p| (p.name_a, p.name_b)).collect();
        assert_eq!(
            names,
            [
                ("G. Labranche".to_owned(), "Gary A Labranche".to_owned()),
                ("G. Labranche".to_owned(), "Labranche Gary".to_owned()),
                ("Gary A Labranche".to_owned(), "Labranche Gary".to_owned()),
            ]
        );
        assert!(variant_pairs(&[person("3", "Solo", &[], "US")]).is_empty());
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("name{i}")).collect()
    }

    #[test]
    fn random_pairs_counts() {
        assert_eq!(random_pairs(&names(4), 7).unwrap().len(), 2);
        assert_eq!(random_pairs(&names(3), 7).unwrap().len(), 1);
        assert_eq!(random_pairs(&names(25_462), 7).unwrap().len(), 12_731);
        assert!(matches!(random_pairs(&names(1), 7), Err(DatagenError::TooFewNames(1))));
        let dup = vec!["a".to_owned(), "a".to_owned()];
        assert!(matches!(random_pairs(&dup, 7), Err(DatagenError::DuplicateName(_))));
    }

    #[test]
    fn random_pairs_reproducible_and_seed_sensitive() {
        let ns = names(100);
        assert_eq!(random_pairs(&ns, 42).unwrap(), random_pairs(&ns, 42).unwrap());
        assert_ne!(random_pairs(&ns, 42).unwrap(), random_pairs(&ns, 43).unwrap());
    }

    #[test]
    fn shuffle_is_pinned() {
        // Guards the documented procedure against silent changes.
        let mut v: Vec<u32> = (0..10).collect();
        seeded_shuffle(&mut v, 0);
        let mut again: Vec<u32> = (0..10).collect();
        let mut rng = rng_for(0);
        for i in (1..10).rev() {
            let j = uniform_index(&mut rng, i + 1);
            again.swap(i, j);
        }
        assert_eq!(v, again);
        let mut sorted = v.clone();
        sorted.sort();
        assert_eq!(sorted, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn shuffle_is_roughly_uniform() {
        // position of element 0 over many seeds
        let mut counts = [0usize; 4];
        for seed in 0..4000 {
            let mut v = [0u8, 1, 2, 3];
            seeded_shuffle(&mut v, seed);
            counts[v.iter().position(|&x| x == 0).unwrap()] += 1;
        }
        for c in counts {
            assert!((850..1150).contains(&c), "{counts:?}");
        }
    }

    struct Const(f64, Option<usize>);

    impl PairScoreProvider for Const {
        fn pair_scores(&self, pairs: &[PairRequest<'_>]) -> Result<Vec<PairScore>, ProviderError> {
            pairs
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    if Some(i) == self.1 {
                        return Err(ProviderError::MissingScore {
                            pair_id: p.pair_id.to_owned(),
                            direction: p.direction,
                        });
                    }
                    Ok(PairScore {
                        pair_id: p.pair_id.to_owned(),
                        model_id: "mock-ce".into(),
                        direction: p.direction,
                        score: self.0,
                    })
                })
                .collect()
        }
    }

    #[test]
    fn score_pairs_uses_raw_scores() {
        let ps = random_pairs(&names(6), 1).unwrap();
        let scored = score_pairs(&ps, &Const(0.5, None)).unwrap();
        assert_eq!(scored.len(), 3);
        assert!(scored.iter().all(|p| p.label == 0.5 && p.source == PairSource::RandomScored));
        match score_pairs(&ps, &Const(0.5, Some(1))) {
            Err(DatagenError::Provider(ProviderError::MissingScore { pair_id, .. })) => assert_eq!(pair_id, "rand-1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn names_pipeline_metadata() {
        let es = vec![
            person("1", "Lisa Marie Abato", &["Holly Ryder"], "US"),
            person("2", "Rulan Chao Pian", &["卞趙如蘭"], "US"),
            person("3", "Bob", &[], "US"),
            person("4", "Too Many", &["a", "b", "c", "d"], "US"),
        ];
        let (pairs, meta) = names_dataset(&es, "us", 3, 9, Some(&Const(0.25, None))).unwrap();
        assert_eq!(meta.kept_entities, 3);
        assert_eq!(meta.variant_pairs, 2);
        assert_eq!(meta.random_pairs, 1);
        assert_eq!(meta.total_pairs, pairs.len());
        assert_eq!(meta.model_id.as_deref(), Some("mock-ce"));
        assert_eq!(meta.prng, PRNG_NAME);
        assert!(pairs.iter().all(|p| p.name_a != p.name_b));
    }

    fn words_oracle(n: u64) -> String {
        let table = [
            (0, "zero"), (1, "one"), (7, "seven"), (10, "ten"), (11, "eleven"), (13, "thirteen"),
            (19, "nineteen"), (20, "twenty"), (21, "twenty-one"), (40, "forty"), (42, "forty-two"),
            (99, "ninety-nine"), (100, "one hundred"), (101, "one hundred one"),
            (110, "one hundred ten"), (999, "nine hundred ninety-nine"), (1000, "one thousand"),
            (1001, "one thousand one"), (12_345, "twelve thousand three hundred forty-five"),
            (100_000, "one hundred thousand"),
            (999_999, "nine hundred ninety-nine thousand nine hundred ninety-nine"),
        ];
        table.iter().find(|(k, _)| *k == n).unwrap().1.to_owned()
    }

    #[test]
    fn number_words_table() {
        for n in [0, 1, 7, 10, 11, 13, 19, 20, 21, 40, 42, 99, 100, 101, 110, 999, 1000, 1001, 12_345, 100_000, 999_999] {
            assert_eq!(number_to_words(n).unwrap(), words_oracle(n), "{n}");
        }
        assert!(matches!(number_to_words(1_000_000), Err(DatagenError::OutOfRange(_))));
    }

    #[test]
    fn numbers_eleven() {
        let ds = numbers_dataset(20).unwrap();
        let has = |a: &str, b: &str, l: u8| ds.iter().any(|p| p.text_a == a && p.text_b == b && p.label == l);
        assert!(has("11", "eleven", 1));
        assert!(has("eleven", "11", 1));
        assert!(has("11", "12", 0));
        assert!(has("11", "10", 0));
        assert!(!ds.iter().any(|p| p.text_b == "-1"));
        assert!(matches!(numbers_dataset(0), Err(DatagenError::InvalidMaxN)));
    }

    #[test]
    fn person_dump_formats() {
        let csv = "entity_id,name,alternative_names,nationality\n\
                   q1,Lisa Marie Abato,Holly Ryder,United States\n\
                   q2,Rulan Chao Pian,卞趙如蘭;Rulan Pian,United States\n\
                   q3,Solo,,Germany\n";
        let es = parse_persons_csv(csv).unwrap();
        assert_eq!(es[1].variants, ["卞趙如蘭", "Rulan Pian"]);
        assert!(es[2].variants.is_empty());
        let nd = "{\"entity_id\":\"q1\",\"name\":\"A\",\"alternative_names\":\"B;C\",\"nationality\":\"US\"}\n\
                  {\"entity_id\":\"q2\",\"name\":\"D\",\"alternative_names\":null,\"nationality\":\"US\"}\n";
        let es = parse_persons_ndjson(nd).unwrap();
        assert_eq!(es[0].variants, ["B", "C"]);
        assert!(matches!(
            parse_persons_csv("entity_id,name,alternative_names,nationality\nq1,,,US\n"),
            Err(DatagenError::Parse { row: 2, .. })
        ));
    }

    fn binom2(k: usize) -> usize {
        k * k.saturating_sub(1) / 2
    }

    proptest! {
        #[test]
        fn variant_count_matches_enumeration(sizes in prop::collection::vec(0usize..6, 0..12)) {
            let es: Vec<_> = sizes
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    let vs: Vec<String> = (0..k).map(|j| format!("v{i}-{j}")).collect();
                    PersonEntity::new(i.to_string(), &format!("c{i}"), &vs, "US").unwrap()
                })
                .collect();
            let expect: usize = sizes.iter().map(|k| binom2(k + 1)).sum();
            let ps = variant_pairs(&es);
            prop_assert_eq!(ps.len(), expect);
            prop_assert!(ps.iter().all(|p| p.name_a < p.name_b));
        }

        #[test]
        fn random_pairs_partition_names(n in 2usize..60, seed in any::<u64>()) {
            let ns = names(n);
            let ps = random_pairs(&ns, seed).unwrap();
            prop_assert_eq!(ps.len(), n / 2);
            let mut used: Vec<&String> = ps.iter().flat_map(|(a, b)| [a, b]).collect();
            used.sort();
            used.dedup();
            prop_assert_eq!(used.len(), 2 * (n / 2));
        }
    }
}
