//! End-to-end exercises of the command-line interface: exit codes,
//! subcommand wiring, and artifact emission.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qsarkit"))
}

fn repo_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn demo_activity() -> String {
    repo_path("data/demo_activity.csv").display().to_string()
}

fn demo_descriptors() -> String {
    repo_path("data/demo_descriptors.csv").display().to_string()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).to_string()
}

/// Fast annealing schedule so CLI runs stay quick.
fn fast_config(dir: &Path) -> PathBuf {
    let path = dir.join("fast.conf");
    fs::write(
        &path,
        "t_initial = 0.5\ncooling = 0.6\nsteps_per_temp = 10\nt_min = 0.01\n\
         randomization_iterations = 12\n",
    )
    .unwrap();
    path
}

#[test]
fn ingest_reports_table_shape() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "ingest",
            "--activity",
            &demo_activity(),
            "--descriptors",
            &demo_descriptors(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stdout(&output).contains("40 compounds x 12 descriptors"));
    assert!(dir.path().join("dataset.json").exists());
}

#[test]
fn preprocess_names_removed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "preprocess",
            "--activity",
            &demo_activity(),
            "--descriptors",
            &demo_descriptors(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stdout(&output).contains("kept 10 descriptors (1 constant, 1 correlated removed)"));
    let report = fs::read_to_string(dir.path().join("preprocess_report.json")).unwrap();
    assert!(report.contains("flat_count"));
    assert!(report.contains("chi5chain_dup"));
}

#[test]
fn split_accepts_either_mode_but_not_both() {
    let dir = tempfile::tempdir().unwrap();
    let ok = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "split",
            "--activity",
            &demo_activity(),
            "--descriptors",
            &demo_descriptors(),
            "--test-size",
            "10",
        ])
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", stderr(&ok));
    assert!(stdout(&ok).contains("train 30"));
    assert!(stdout(&ok).contains("test 10"));
    assert!(dir.path().join("split.json").exists());

    let conflict = bin()
        .args([
            "split",
            "--activity",
            &demo_activity(),
            "--descriptors",
            &demo_descriptors(),
            "--test-size",
            "10",
            "--dissimilarity",
            "0.5",
        ])
        .output()
        .unwrap();
    assert_eq!(conflict.status.code(), Some(2), "{}", stderr(&conflict));
}

#[test]
fn conflicting_config_file_settings_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(
        &config,
        format!(
            "activity_path = {}\ndescriptor_path = {}\n\
             dissimilarity = 0.5\ntarget_test = 10\nsubset_size = 3\n",
            demo_activity(),
            demo_descriptors()
        ),
    )
    .unwrap();
    let output = bin()
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out-dir",
            dir.path().join("out").to_str().unwrap(),
            "run",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("mutually exclusive"));
}

#[test]
fn missing_input_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "ingest",
            "--activity",
            "no_such_file.csv",
            "--descriptors",
            &demo_descriptors(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("stage ingest"));
}

#[test]
fn unknown_flag_exits_2() {
    let output = bin().args(["run", "--frobnicate"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn validate_renders_table_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "--config",
            fast_config(dir.path()).to_str().unwrap(),
            "--out-dir",
            dir.path().join("out").to_str().unwrap(),
            "--seed",
            "9",
            "validate",
            "--activity",
            &demo_activity(),
            "--descriptors",
            &demo_descriptors(),
            "--test-size",
            "10",
            "--method",
            "MLR",
            "--subset-size",
            "3",
            "--table2",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("gate:"));
    assert!(text.contains("parameter"));
    assert!(text.contains("pred_r2"));
    assert!(dir.path().join("out/validation.json").exists());
    assert!(dir.path().join("out/gate.json").exists());
}

#[test]
fn run_emits_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("artifacts");
    let output = bin()
        .args([
            "--config",
            fast_config(dir.path()).to_str().unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
            "--seed",
            "11",
            "run",
            "--activity",
            &demo_activity(),
            "--descriptors",
            &demo_descriptors(),
            "--test-size",
            "10",
            "--method",
            "PLS",
            "--subset-size",
            "4",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    for name in [
        "dataset.json",
        "preprocess_report.json",
        "split.json",
        "selection.json",
        "sa_trace.csv",
        "model.json",
        "predictions.csv",
        "validation.json",
        "gate.json",
        "randomization.json",
        "scatter.csv",
        "scatter.svg",
        "contributions.csv",
        "contributions.svg",
        "stats_table.txt",
        "stats_table.csv",
    ] {
        assert!(out.join(name).exists(), "missing {name}");
    }
    assert!(stdout(&output).contains("gate:"));
}

#[test]
fn compare_prints_three_method_lines() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "--config",
            fast_config(dir.path()).to_str().unwrap(),
            "--out-dir",
            dir.path().join("cmp").to_str().unwrap(),
            "--seed",
            "13",
            "compare",
            "--activity",
            &demo_activity(),
            "--descriptors",
            &demo_descriptors(),
            "--test-size",
            "10",
            "--descriptor-list",
            "StsCcount,chi5chain,SaaaCcount",
            "--components",
            "3",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let text = stdout(&output);
    for method in ["MLR", "PCR", "PLS"] {
        assert!(
            text.contains(&format!("{method}:")),
            "missing {method} line"
        );
    }
    assert!(dir.path().join("cmp/stats_table.csv").exists());
    assert!(dir.path().join("cmp/compare.json").exists());
    let csv = fs::read_to_string(dir.path().join("cmp/stats_table.csv")).unwrap();
    assert!(csv.starts_with("parameter,PLS,MLR,PCR"));
}

#[test]
fn fit_honors_explicit_descriptor_list() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "fit",
            "--activity",
            &demo_activity(),
            "--descriptors",
            &demo_descriptors(),
            "--dissimilarity",
            "0.4",
            "--method",
            "MLR",
            "--descriptor-list",
            "StsCcount,XlogP",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stdout(&output).contains("MLR model with 2 descriptors"));
    let model = fs::read_to_string(dir.path().join("model.json")).unwrap();
    assert!(model.contains("XlogP"));
    assert!(!dir.path().join("sa_trace.csv").exists());
}

#[test]
fn external_model_files_load_and_predict() {
    // The bundled models double as fixtures for prediction-only loading.
    for name in ["model_pls.json", "model_mlr.json", "model_pcr.json"] {
        let bytes = fs::read(repo_path("data/models").join(name)).unwrap();
        let model = qsarkit::regression::FittedModel::from_json(&bytes).unwrap();
        let zeros: Vec<f64> = vec![0.0; model.spec.descriptors.len()];
        let pred = model.predict_slice(&zeros).unwrap();
        assert!((pred - model.intercept).abs() < 1e-12);
    }
}
