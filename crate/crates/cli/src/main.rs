mod commands;
mod error;
mod settings;

use clap::{Args, Parser, Subcommand};
use error::{CliError, EXIT_VALIDATION};
use std::path::PathBuf;
use std::process::ExitCode;

/// Answer-similarity metrics, correlation studies and augmentation data.
///
/// Every subcommand reads an optional flat `key = value` config file; flags
/// override config keys. Exit status: 0 success, 1 validation error, 2
/// provider or transport error. Errors are printed to stderr as one JSON line.
#[derive(Debug, Parser)]
#[command(name = "answer-sim", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Args)]
struct Common {
    /// Config file (`key = value` lines, `#` comments).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Set any config key, e.g. `--set http.max_retries=5`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

/// Metric provider bindings shared by the scoring subcommands.
#[derive(Debug, Args)]
struct Bindings {
    /// Bind a metric to an interchange file: `METRIC=PATH`. Repeatable.
    #[arg(long, value_name = "METRIC=PATH")]
    provider: Vec<String>,
    /// Bind a metric to an HTTP service: `METRIC=URL`. Repeatable.
    #[arg(long, value_name = "METRIC=URL")]
    endpoint: Vec<String>,
}

#[derive(Debug, Args)]
struct DatasetArgs {
    /// Dataset file (NDJSON or CSV).
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Dataset format; inferred from the extension when omitted.
    #[arg(long, value_parser = ["ndjson", "csv"])]
    format: Option<String>,
    /// Normalization profile: auto (per record language), en or de.
    #[arg(long, value_parser = ["auto", "en", "de"])]
    normalization: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Score one answer pair and print `metric=value` lines.
    Score {
        /// First answer (reference).
        #[arg(long)]
        a: String,
        /// Second answer (candidate).
        #[arg(long)]
        b: String,
        /// Comma-separated metrics, e.g. `em,f1,bleu`.
        #[arg(long)]
        metrics: Option<String>,
        /// Language of the pair.
        #[arg(long, value_parser = ["en", "de"])]
        lang: Option<String>,
        /// Record id used to look the texts up in interchange files.
        #[arg(long)]
        id: Option<String>,
        #[command(flatten)]
        bindings: Bindings,
    },
    /// Full evaluation run: scores, correlations, histograms, timings.
    Eval {
        #[command(flatten)]
        data: DatasetArgs,
        /// Comma-separated metrics.
        #[arg(long)]
        metrics: Option<String>,
        /// Weight BERTScore tokens by idf from the reference side.
        #[arg(long)]
        idf: bool,
        /// Directory for the report files.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Recorded in run_info.json.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        bindings: Bindings,
    },
    /// Split a dataset by token-F1 overlap into f1_zero and f1_nonzero files.
    Partition {
        #[command(flatten)]
        data: DatasetArgs,
        /// Directory for `<name>.f1_zero.ndjson` and `<name>.f1_nonzero.ndjson`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Drop records whose normalized answer pair was seen before.
    Dedup {
        #[command(flatten)]
        data: DatasetArgs,
        /// Output NDJSON file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Remove or strip numbers for the number-ablation study.
    AblateNumbers {
        #[command(flatten)]
        data: DatasetArgs,
        /// drop_rows_with_digit_in_a, strip_digits_both or strip_digits_a_only.
        #[arg(long)]
        mode: Option<String>,
        /// Output NDJSON file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the name-pair dataset from a person dump.
    NamesGen {
        /// Person dump (CSV or NDJSON).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output NDJSON; metadata goes next to it as `.meta.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Shuffle seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Nationality to keep (case-insensitive). Default: United States.
        #[arg(long)]
        nationality: Option<String>,
        /// Keep entities with at most this many alternative names. Default: 3.
        #[arg(long)]
        max_variants: Option<usize>,
        /// Pair-score file for the random pairs (pair ids `rand-<i>`).
        #[arg(long, conflicts_with = "endpoint")]
        provider: Option<PathBuf>,
        /// Cross-encoder service for the random pairs.
        #[arg(long)]
        endpoint: Option<String>,
        /// Only write the unscored random pairs, for external scoring.
        #[arg(long)]
        pairs_only: bool,
    },
    /// Build the number-pair dataset.
    NumbersGen {
        /// Largest number (at least 1).
        #[arg(long)]
        max_n: Option<u64>,
        /// Output NDJSON; metadata goes next to it as `.meta.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare each record's score in both directions.
    AuditSymmetry {
        #[command(flatten)]
        data: DatasetArgs,
        /// Metric to audit: a lexical metric, bi_encoder or sas.
        #[arg(long)]
        metric: Option<String>,
        /// Interchange file for the metric.
        #[arg(long, conflicts_with = "endpoint")]
        provider: Option<PathBuf>,
        /// HTTP service for the metric.
        #[arg(long)]
        endpoint: Option<String>,
        /// Per-record CSV; the summary is printed as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// BERTScore correlations per layer from token files (one per layer).
    LayerSweep {
        #[command(flatten)]
        data: DatasetArgs,
        /// Token embedding file. Repeatable.
        #[arg(long = "tokens", value_name = "PATH")]
        tokens: Vec<PathBuf>,
        /// Weight tokens by idf from the reference side.
        #[arg(long)]
        idf: bool,
        /// Output CSV; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::validation(e.to_string().trim_end());
            eprintln!("{}", err.to_json_line());
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.code as u8)
        }
    }
}
