use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sparse_forest::Dataset;

fn sparse_forest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparse-forest")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_fit_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train");
    let split = dir.path().join("split");
    let model = dir.path().join("model");
    for (out, seed) in [(&train, "1"), (&split, "2")] {
        let o =
            sparse_forest(&["generate", "--model", "sinus", "--d", "4", "--n", "300", "--seed", seed, "--out", p(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let data = Dataset::load_csv(train.join("data.csv")).unwrap();
    assert_eq!((data.n(), data.d()), (300, 4));

    let o = sparse_forest(&[
        "fit",
        "--data",
        p(&train.join("data.csv")),
        "--split-data",
        p(&split.join("data.csv")),
        "--policy",
        "guided",
        "--k-n",
        "32",
        "--trees",
        "20",
        "--out",
        p(&model),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = sparse_forest(&[
        "predict",
        "--forest",
        p(&model.join("forest.json")),
        "--data",
        p(&train.join("data.csv")),
        "--out",
        p(&model),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(model.join("predictions.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("prediction"));
    let preds: Vec<f64> = lines.map(|l| l.parse().unwrap()).collect();
    assert_eq!(preds.len(), 300);
    let (lo, hi) = data.y().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(preds.iter().all(|v| *v >= lo && *v <= hi));
}

#[test]
fn fit_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let o = sparse_forest(&["generate", "--d", "3", "--n", "100", "--out", p(dir.path())]);
    assert!(o.status.success());
    let csv = dir.path().join("data.csv");
    let mut snapshots = Vec::new();
    for (name, threads) in [("a", "1"), ("b", "3")] {
        let out = dir.path().join(name);
        let o = sparse_forest(&[
            "fit",
            "--data",
            p(&csv),
            "--policy",
            "cart",
            "--trees",
            "10",
            "--seed",
            "9",
            "--threads",
            threads,
            "--out",
            p(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        snapshots.push(fs::read(out.join("forest.json")).unwrap());
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "model = { name = \"sinus\" }\nd_values = []\n").unwrap();
    let o = sparse_forest(&["mse-curve", "--config", p(&bad), "--out", p(dir.path()), "--no-plots"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let o = sparse_forest(&[
        "fit",
        "--data",
        p(&dir.path().join("missing.csv")),
        "--policy",
        "guided",
        "--out",
        p(dir.path()),
    ]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn predict_rejects_wrong_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let d3 = dir.path().join("d3");
    let d5 = dir.path().join("d5");
    assert!(sparse_forest(&["generate", "--d", "3", "--n", "50", "--out", p(&d3)]).status.success());
    assert!(sparse_forest(&["generate", "--d", "5", "--n", "50", "--out", p(&d5)]).status.success());
    assert!(sparse_forest(&["fit", "--data", p(&d3.join("data.csv")), "--trees", "5", "--out", p(&d3)])
        .status
        .success());
    let o = sparse_forest(&[
        "predict",
        "--forest",
        p(&d3.join("forest.json")),
        "--data",
        p(&d5.join("data.csv")),
        "--out",
        p(&d5),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn exact_theory_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = sparse_forest(&["theory-check", "--exact-only", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(dir.path().join("bound_report.csv")).unwrap();
    assert!(report.lines().count() > 20_000);
}

#[test]
fn cut_probs_writes_table_manifest_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let spec = "model = { name = \"sinus\" }\nd_values = [5]\nn_values = [40]\nreplicates = 2\ntrees = 10\ntest_size = 10\npolicy = \"guided\"\nseed = 3\n";
    let path = dir.path().join("spec.toml");
    fs::write(&path, spec).unwrap();
    let o = sparse_forest(&["cut-probs", "--config", p(&path), "--out", p(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("cut_probs.csv").exists());
    assert!(dir.path().join("manifest.toml").exists());
    assert!(fs::read_dir(dir.path()).unwrap().any(|e| e.unwrap().path().extension().is_some_and(|x| x == "svg")));
}
