use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn hc4rc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hc4rc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn experiment(out: &Path, extra: &[&str]) -> Output {
    let dataset = fixture("dataset.csv");
    let annotations = fixture("annotations.conllu");
    let mut args = vec![
        "experiment",
        "--dataset",
        dataset.to_str().unwrap(),
        "--annotations",
        annotations.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    hc4rc(&args)
}

#[test]
fn help_exits_zero() {
    let out = hc4rc(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("experiment"));
}

#[test]
fn all_strategies_share_one_fold_plan() {
    let dir = tempfile::tempdir().unwrap();
    let out = experiment(dir.path(), &["--strategy", "all", "--seed", "7"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let strategies = report["strategies"].as_array().unwrap();
    let names: Vec<&str> = strategies
        .iter()
        .map(|s| s["strategy"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        ["hc4rc", "flat", "flat-oversample", "flat-undersample"]
    );
    let sizes = |s: &serde_json::Value| -> Vec<u64> {
        s["folds"]
            .as_array()
            .unwrap()
            .iter()
            .map(|f| f["test_size"].as_u64().unwrap())
            .collect()
    };
    for s in strategies {
        assert_eq!(sizes(s), sizes(&strategies[0]));
    }
    assert!(dir.path().join("report.txt").exists());
    for fold in 0..10 {
        assert!(dir
            .path()
            .join(format!("confusion_hc4rc_{fold}.csv"))
            .exists());
    }
    let leftovers: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn same_seed_same_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = experiment(
            d.path(),
            &["--strategy", "hc4rc,flat+undersample", "--seed", "11"],
        );
        assert!(out.status.success());
    }
    assert_eq!(
        fs::read(a.path().join("report.json")).unwrap(),
        fs::read(b.path().join("report.json")).unwrap()
    );
}

#[test]
fn seed_is_required() {
    let dir = tempfile::tempdir().unwrap();
    let out = experiment(dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn config_error_exit_two() {
    let out = hc4rc(&[
        "experiment",
        "--dataset",
        "/nonexistent.csv",
        "--annotations",
        "x",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = experiment(dir.path(), &["--seed", "1", "--strategy", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn data_error_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "ProjectID,Class\nP1,F\n").unwrap();
    let out = hc4rc(&[
        "experiment",
        "--dataset",
        bad.to_str().unwrap(),
        "--annotations",
        fixture("annotations.conllu").to_str().unwrap(),
        "--seed",
        "1",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);
    assert!(!dir.path().join("out/report.json").exists());
}

#[test]
fn degenerate_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    // Six projects cannot fill ten project folds.
    let out = experiment(dir.path(), &["--seed", "1", "--folds", "project"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "dataset = {:?}\nannotations = {:?}\nseed = 5\nsvm_c = 0.5\nstrategy = \"flat\"\n",
            fixture("dataset.csv"),
            fixture("annotations.conllu")
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = hc4rc(&[
        "experiment",
        "--config",
        cfg.to_str().unwrap(),
        "--svm-c",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 5);
    assert_eq!(report["config"]["train"]["svm"]["c"], 2.0);
    assert_eq!(report["strategies"][0]["strategy"], "flat");

    fs::write(&cfg, "sed = 5\n").unwrap();
    let out = hc4rc(&["experiment", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inspect_prints_trace_and_coverage() {
    let out = hc4rc(&[
        "inspect",
        "--dataset",
        fixture("dataset.csv").to_str().unwrap(),
        "--annotations",
        fixture("annotations.conllu").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("cut:"));
    assert!(text.contains("annotation coverage: 60/60"));
    assert!(text.contains("n = 60, d = "));
}

#[test]
fn inspect_single_class_is_degenerate() {
    let out = hc4rc(&[
        "inspect",
        "--dataset",
        fixture("single_class.csv").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("min = ∅"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn inspect_lists_missing_annotations() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("annotations.conllu")).unwrap();
    // Drop every tenth sentence block.
    let blocks: Vec<&str> = text
        .split("\n\n")
        .filter(|b| !b.trim().is_empty())
        .collect();
    let mut dropped = Vec::new();
    let mut kept = String::new();
    for (i, b) in blocks.iter().enumerate() {
        if i % 10 == 0 {
            dropped.push(
                b.lines()
                    .next()
                    .unwrap()
                    .trim_start_matches("# req_id = ")
                    .to_owned(),
            );
        } else {
            kept.push_str(b);
            kept.push_str("\n\n");
        }
    }
    let partial = dir.path().join("partial.conllu");
    fs::write(&partial, kept).unwrap();
    let out = hc4rc(&[
        "inspect",
        "--dataset",
        fixture("dataset.csv").to_str().unwrap(),
        "--annotations",
        partial.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("annotation coverage: 54/60"));
    for id in &dropped {
        assert!(stdout.contains(id.as_str()), "{id} not listed");
    }
}

#[test]
fn inspect_load_failure_exit_three() {
    let out = hc4rc(&["inspect", "--dataset", "/nonexistent.csv"]);
    assert_eq!(out.status.code(), Some(3));
}
