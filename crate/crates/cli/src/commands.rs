use crate::error::CliError;
use crate::settings::Settings;
use crate::{Bindings, Cli, Cmd, DatasetArgs};
use answer_sim::corpus::{self, AblationMode, Dataset, DatasetFormat, PartitionKey};
use answer_sim::datagen::{self, NamesMetadata, DEFAULT_MAX_VARIANTS, PRNG_NAME};
use answer_sim::embmetrics;
use answer_sim::lexmetrics::Lang;
use answer_sim::providers::{
    audit_symmetry, text_id, BiEncoderScorer, Direction, DirectionalScorer, LexicalScorer, PairScorer,
    ProviderError, Side, TextRequest, TokenEmbeddingProvider,
};
use answer_sim::report::{self, fmt4, MetricKind, MetricSpec};
use serde_json::json;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

const DEFAULT_NATIONALITY: &str = "United States";
const DEFAULT_SCORE_METRICS: &str = "em,f1,bleu,rouge_l,meteor";
/// Binding name of the cross-encoder used to label random name pairs.
const NAMES_SCORER: &str = "sas";

pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut s = Settings::load(cli.common.config.as_deref(), &cli.common.set)?;
    match cli.cmd {
        Cmd::Score {
            a,
            b,
            metrics,
            lang,
            id,
            bindings,
        } => {
            s.set_opt("metrics", metrics)?;
            s.set_opt("lang", lang)?;
            s.set_opt("id", id)?;
            apply_bindings(&mut s, &bindings)?;
            if s.run.metrics.is_empty() {
                s.set("metrics", DEFAULT_SCORE_METRICS)?;
            }
            let lang: Lang = s.parsed("lang")?.unwrap_or(Lang::En);
            let id = s.get("id").unwrap_or("pair").to_owned();
            for (name, v) in report::score_texts(&id, &a, &b, lang, &s.run)? {
                println!("{name}={v}");
            }
        }
        Cmd::Eval {
            data,
            metrics,
            idf,
            output_dir,
            seed,
            bindings,
        } => {
            apply_dataset(&mut s, &data)?;
            s.set_opt("metrics", metrics)?;
            if idf {
                s.set("idf", "true")?;
            }
            s.set_opt("output_dir", output_dir.map(|p| p.display().to_string()))?;
            s.set_opt("seed", seed)?;
            apply_bindings(&mut s, &bindings)?;
            let bundle = report::run(&s.run)?;
            print!("{}", bundle.correlations_csv());
        }
        Cmd::Partition { data, output_dir } => {
            apply_dataset(&mut s, &data)?;
            s.set_opt("output_dir", output_dir.map(|p| p.display().to_string()))?;
            let d = load(&s)?;
            let dir = s
                .run
                .output_dir
                .clone()
                .ok_or_else(|| CliError::validation("missing `output_dir` (flag or config key)"))?;
            fs::create_dir_all(&dir)?;
            let norm = s.run.normalization.profile_for(d.lang);
            let parts = corpus::partition(&d, &norm);
            let mut counts = serde_json::Map::new();
            for (key, part) in &parts {
                counts.insert(key.as_str().into(), json!(part.len()));
                if *key != PartitionKey::All {
                    part.write_ndjson(&dir.join(format!("{}.{}.ndjson", d.name, key)))?;
                }
            }
            println!("{}", serde_json::Value::Object(counts));
        }
        Cmd::Dedup { data, out } => {
            apply_dataset(&mut s, &data)?;
            set_path(&mut s, "out", out)?;
            let d = load(&s)?;
            let (kept, removed) = corpus::dedup(&d);
            kept.write_ndjson(&s.path("out")?)?;
            println!("{}", json!({"input": d.len(), "kept": kept.len(), "removed": removed}));
        }
        Cmd::AblateNumbers { data, mode, out } => {
            apply_dataset(&mut s, &data)?;
            s.set_opt("mode", mode)?;
            set_path(&mut s, "out", out)?;
            let mode: AblationMode = s
                .parsed("mode")?
                .ok_or_else(|| CliError::validation("missing `mode` (flag or config key)"))?;
            let d = load(&s)?;
            let kept = corpus::ablate_numbers(&d, mode);
            kept.write_ndjson(&s.path("out")?)?;
            println!("{}", json!({"input": d.len(), "kept": kept.len(), "removed": d.len() - kept.len()}));
        }
        Cmd::NamesGen {
            input,
            out,
            seed,
            nationality,
            max_variants,
            provider,
            endpoint,
            pairs_only,
        } => {
            set_path(&mut s, "input", input)?;
            set_path(&mut s, "out", out)?;
            s.set_opt("seed", seed)?;
            s.set_opt("nationality", nationality)?;
            s.set_opt("max_variants", max_variants)?;
            s.set_opt(&format!("provider.{NAMES_SCORER}"), provider.map(|p| p.display().to_string()))?;
            s.set_opt(&format!("endpoint.{NAMES_SCORER}"), endpoint)?;
            names_gen(&s, pairs_only)?;
        }
        Cmd::NumbersGen { max_n, out } => {
            s.set_opt("max_n", max_n)?;
            set_path(&mut s, "out", out)?;
            let max_n: u64 = s
                .parsed("max_n")?
                .ok_or_else(|| CliError::validation("missing `max_n` (flag or config key)"))?;
            let pairs = datagen::numbers_dataset(max_n)?;
            let positives = pairs.iter().filter(|p| p.label == 1).count();
            let meta = json!({
                "max_n": max_n,
                "positives": positives,
                "negatives": pairs.len() - positives,
                "total": pairs.len(),
            });
            datagen::write_outputs(&s.path("out")?, &pairs, &meta)?;
            println!("{meta}");
        }
        Cmd::AuditSymmetry {
            data,
            metric,
            provider,
            endpoint,
            out,
        } => {
            apply_dataset(&mut s, &data)?;
            s.set_opt("metric", metric)?;
            set_path(&mut s, "out", out)?;
            let spec: MetricSpec = s.parsed("metric")?.unwrap_or(MetricSpec {
                kind: MetricKind::Lexical(answer_sim::lexmetrics::LexicalMetric::F1),
                label: None,
            });
            let name = spec.name();
            s.set_opt(&format!("provider.{name}"), provider.map(|p| p.display().to_string()))?;
            s.set_opt(&format!("endpoint.{name}"), endpoint)?;
            audit(&s, &spec)?;
        }
        Cmd::LayerSweep { data, tokens, idf, out } => {
            apply_dataset(&mut s, &data)?;
            if !tokens.is_empty() {
                let joined: Vec<String> = tokens.iter().map(|p| p.display().to_string()).collect();
                s.set("layer_files", &joined.join(","))?;
            }
            if idf {
                s.set("idf", "true")?;
            }
            set_path(&mut s, "out", out)?;
            let files: Vec<PathBuf> = s
                .require("layer_files")?
                .split(',')
                .filter(|p| !p.is_empty())
                .map(PathBuf::from)
                .collect();
            let d = load(&s)?;
            let norm = s.run.normalization.profile_for(d.lang);
            let rows = report::layer_sweep_files(&d, &files, &norm, s.run.idf)?;
            let csv = report::layer_sweep_csv(&rows);
            match s.get("out") {
                Some(p) => fs::write(p, csv)?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}

fn set_path(s: &mut Settings, key: &str, p: Option<PathBuf>) -> Result<(), CliError> {
    s.set_opt(key, p.map(|p| p.display().to_string()))
}

fn apply_dataset(s: &mut Settings, d: &DatasetArgs) -> Result<(), CliError> {
    s.set_opt("dataset", d.dataset.as_ref().map(|p| p.display().to_string()))?;
    s.set_opt("format", d.format.as_ref())?;
    s.set_opt("normalization", d.normalization.as_ref())
}

fn apply_bindings(s: &mut Settings, b: &Bindings) -> Result<(), CliError> {
    for (prefix, items) in [("provider", &b.provider), ("endpoint", &b.endpoint)] {
        for item in items {
            let (metric, target) = item
                .split_once('=')
                .ok_or_else(|| CliError::validation(format!("--{prefix} expects METRIC=VALUE, got `{item}`")))?;
            s.set(&format!("{prefix}.{}", metric.trim()), target.trim())?;
        }
    }
    Ok(())
}

fn load(s: &Settings) -> Result<Dataset, CliError> {
    let path = s.dataset_path()?;
    let format = match s.run.format {
        Some(f) => f,
        None => DatasetFormat::from_path(path)
            .ok_or_else(|| CliError::validation(format!("cannot infer format of {}", path.display())))?,
    };
    Ok(corpus::load_dataset(path, format)?)
}

fn names_gen(s: &Settings, pairs_only: bool) -> Result<(), CliError> {
    let input = s.path("input")?;
    let out = s.path("out")?;
    let nationality = s.get("nationality").unwrap_or(DEFAULT_NATIONALITY).to_owned();
    let max_variants = s.parsed("max_variants")?.unwrap_or(DEFAULT_MAX_VARIANTS);
    let seed = s.run.seed;
    let entities = datagen::load_persons(&input)?;
    if pairs_only {
        let kept = datagen::filter_entities(&entities, &nationality, max_variants);
        let mut seen = std::collections::HashSet::new();
        let names: Vec<String> = kept
            .iter()
            .map(|e| e.canonical_name.clone())
            .filter(|n| seen.insert(n.clone()))
            .collect();
        let pairs = datagen::random_pairs(&names, seed)?;
        let rows: Vec<_> = pairs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| json!({"pair_id": datagen::random_pair_id(i), "name_a": a, "name_b": b}))
            .collect();
        let meta = NamesMetadata {
            seed,
            prng: PRNG_NAME.into(),
            nationality,
            max_variants,
            input_entities: entities.len(),
            kept_entities: kept.len(),
            variant_pairs: 0,
            random_names: names.len(),
            random_pairs: rows.len(),
            total_pairs: rows.len(),
            model_id: None,
        };
        datagen::write_outputs(&out, &rows, &meta)?;
        println!("{}", serde_json::to_string(&meta).expect("metadata serializes"));
        return Ok(());
    }
    if !s.run.bindings.contains_key(NAMES_SCORER) {
        return Err(CliError::validation(
            "names-gen needs --provider or --endpoint to label random pairs (or --pairs-only)",
        ));
    }
    let provider = report::pair_provider(&s.run, NAMES_SCORER)?;
    let (pairs, meta) = datagen::names_dataset(&entities, &nationality, max_variants, seed, Some(provider.as_ref()))?;
    datagen::write_outputs(&out, &pairs, &meta)?;
    println!("{}", serde_json::to_string(&meta).expect("metadata serializes"));
    Ok(())
}

/// BERTScore F1 with the direction's first text as reference.
struct BertScorer<'a>(&'a dyn TokenEmbeddingProvider);

impl DirectionalScorer for BertScorer<'_> {
    fn score(&self, record: &corpus::EvalRecord, direction: Direction) -> Result<f64, ProviderError> {
        let ida = text_id(&record.id, Side::A);
        let idb = text_id(&record.id, Side::B);
        let a = TextRequest { id: &ida, text: &record.answer_a };
        let b = TextRequest { id: &idb, text: &record.answer_b };
        let reqs = match direction {
            Direction::Ab => [a, b],
            Direction::Ba => [b, a],
        };
        let sets = self.0.token_embeddings(&reqs)?;
        Ok(embmetrics::bert_score(&sets[0], &sets[1], None)?.f1)
    }
}

fn audit(s: &Settings, spec: &MetricSpec) -> Result<(), CliError> {
    let d = load(s)?;
    let name = spec.name();
    let rep = match spec.kind {
        MetricKind::Lexical(m) => audit_symmetry(&LexicalScorer(m), &d)?,
        MetricKind::BiEncoder => {
            let p = report::sentence_provider(&s.run, &name)?;
            audit_symmetry(&BiEncoderScorer(p.as_ref()), &d)?
        }
        MetricKind::Sas => {
            let p = report::pair_provider(&s.run, &name)?;
            audit_symmetry(&PairScorer(p.as_ref()), &d)?
        }
        MetricKind::BertScore => {
            let p = report::token_provider(&s.run, &name)?;
            audit_symmetry(&BertScorer(p.as_ref()), &d)?
        }
    };
    if let Some(out) = s.get("out") {
        let mut csv = String::from("record_id,ab,ba,gap\n");
        for e in &rep.entries {
            let _ = writeln!(csv, "{},{},{},{}", e.record_id, fmt4(e.ab), fmt4(e.ba), fmt4(e.gap));
        }
        fs::write(Path::new(out), csv)?;
    }
    let top: Vec<_> = rep.entries.iter().take(5).collect();
    println!(
        "{}",
        json!({"metric": name, "records": rep.entries.len(), "max_gap": rep.max_gap, "mean_gap": rep.mean_gap, "top": top})
    );
    Ok(())
}
