use answer_sim::corpus::{load_dataset, DatasetFormat, PartitionKey};
use answer_sim::lexmetrics::NormalizationProfile;
use answer_sim::providers::{
    audit_symmetry, file_provider_load, sas_lookup, text_id, Direction, PairScorer, ProviderError, ProviderKind,
    Side,
};
use answer_sim::report::{self, layer_sweep_files, RunConfig};
use std::fs;
use std::path::{Path, PathBuf};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn dataset() -> answer_sim::corpus::Dataset {
    load_dataset(&fixtures().join("dataset.ndjson"), DatasetFormat::Ndjson).unwrap()
}

#[test]
fn fixture_files_load_with_their_manifests() {
    for (name, kind) in [
        ("sentence.ndjson", ProviderKind::Sentence),
        ("tokens_l2.ndjson", ProviderKind::Token),
        ("tokens_l12.ndjson", ProviderKind::Token),
        ("pairs.ndjson", ProviderKind::Pair),
        ("oracle_pairs.ndjson", ProviderKind::Pair),
    ] {
        let p = file_provider_load(fixtures().join(name)).unwrap();
        assert_eq!(p.kind(), kind, "{name}");
    }
    let tokens = file_provider_load(fixtures().join("tokens_l12.ndjson")).unwrap().into_token().unwrap();
    assert_eq!(tokens.layer(), 12);
    let d = dataset();
    for r in &d.records {
        tokens.get(&text_id(&r.id, Side::A)).unwrap();
        tokens.get(&text_id(&r.id, Side::B)).unwrap();
    }
}

#[test]
fn tampered_fixture_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["pairs.ndjson", "pairs.manifest.json"] {
        fs::copy(fixtures().join(f), dir.path().join(f)).unwrap();
    }
    let data = dir.path().join("pairs.ndjson");
    let text = fs::read_to_string(&data).unwrap().replacen("0.", "0.0", 1);
    fs::write(&data, text).unwrap();
    assert!(matches!(file_provider_load(&data), Err(ProviderError::HashMismatch { .. })));
}

#[test]
fn cross_encoder_fixture_is_directional() {
    let d = dataset();
    let pairs = file_provider_load(fixtures().join("pairs.ndjson")).unwrap().into_pair().unwrap();
    let n11 = d.records.iter().find(|r| r.id == "n11").unwrap();
    assert_eq!(sas_lookup(&pairs, n11, Direction::Ab).unwrap(), 0.89);
    assert_eq!(sas_lookup(&pairs, n11, Direction::Ba).unwrap(), 0.09);
    let report = audit_symmetry(&PairScorer(&pairs), &d).unwrap();
    assert_eq!(report.entries[0].record_id, "n11");
    assert!((report.max_gap.unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn layer_two_tracks_labels_better_than_layer_twelve() {
    let d = dataset();
    let files = [fixtures().join("tokens_l2.ndjson"), fixtures().join("tokens_l12.ndjson")];
    let rows = layer_sweep_files(&d, &files, &NormalizationProfile::english(), false).unwrap();
    let rho = |layer| {
        rows.iter()
            .find(|r| r.layer == layer && r.partition == PartitionKey::All)
            .and_then(|r| r.outcome.triple())
            .map(|t| t.spearman_rho)
            .unwrap()
    };
    assert!(rho(2) > rho(12), "layer 2 {} vs layer 12 {}", rho(2), rho(12));
    let csv = report::layer_sweep_csv(&rows);
    assert!(csv.starts_with("layer,partition,r,rho,tau,n\n"));
}

#[test]
fn eval_on_fixture_bundle() {
    let out = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::load(&fixtures().join("eval.conf")).unwrap();
    cfg.output_dir = Some(out.path().to_path_buf());
    let bundle = report::run(&cfg).unwrap();

    let oracle = bundle.metric("sas@oracle").unwrap();
    for outcome in oracle.correlation.outcomes.values() {
        let t = outcome.triple().unwrap();
        assert!((t.pearson_r - 1.0).abs() < 1e-12);
        assert!((t.spearman_rho - 1.0).abs() < 1e-12);
        assert!((t.kendall_tau - 1.0).abs() < 1e-12);
    }
    assert_eq!(oracle.correlation.unlabeled, 2);

    let csv = fs::read_to_string(out.path().join("correlations.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("sas@oracle,")).unwrap();
    assert!(row.split(',').skip(1).all(|c| c == "1.0000"), "{row}");

    let scores = fs::read_to_string(out.path().join("scores.ndjson")).unwrap();
    assert_eq!(scores.lines().count(), bundle.dataset.len());
    let nfl: serde_json::Value = serde_json::from_str(scores.lines().next().unwrap()).unwrap();
    assert_eq!(nfl["id"], "nfl");
    assert_eq!(nfl["em"], 0.0);
    assert_eq!(nfl["f1"], 0.0);
    assert_eq!(nfl["partition"], "f1_zero");
    for f in ["histogram.csv", "timings.csv", "run_info.json"] {
        assert!(out.path().join(f).is_file(), "{f}");
    }
}
