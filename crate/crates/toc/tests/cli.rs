//! End-to-end exercises of the `toc` binary: the generate → train → eval →
//! attack flow, sweep/report rendering, and the exit-code contract
//! (0 success, 1 runtime, 2 usage, 3 config).

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn toc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.trim()).expect("stdout is one JSON document")
}

#[test]
fn generate_train_eval_attack_round_trip() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data.tcds");
    let model = dir.path().join("model");

    let out = toc(&[
        "gen-data", "--n", "600", "--snr-s", "10", "--seed", "7",
        "--out", data.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["n_train"], 480);
    assert_eq!(v["n_test"], 120);

    let out = toc(&[
        "train", "--pipeline", "toc", "--data", data.to_str().unwrap(),
        "--snr-c", "10", "--epochs", "3", "--seed", "7",
        "--out", model.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["param_count"], 25276);

    let out = toc(&[
        "eval", "--model", model.to_str().unwrap(),
        "--data", data.to_str().unwrap(), "--seed", "9",
    ]);
    let v = stdout_json(&out);
    let acc = v["accuracy"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&acc));

    let out = toc(&[
        "attack", "fgsm", "--model", model.to_str().unwrap(),
        "--data", data.to_str().unwrap(), "--pnr", "0",
        "--mode", "targeted", "--seed", "11",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["attack"], "fgsm");
    assert!(v["metrics"]["accuracy"].is_f64());

    let out = toc(&[
        "attack", "backdoor", "--data", data.to_str().unwrap(),
        "--tau", "0.2", "--theta", "0.6283185307179586",
        "--epochs", "3", "--seed", "13",
    ]);
    let v = stdout_json(&out);
    assert!(v["metrics"]["acc_poisoned_victim"].is_f64());
}

#[test]
fn missing_seed_is_a_usage_error() {
    let out = toc(&["gen-data", "--n", "100", "--snr-s", "10", "--out", "/tmp/never.tcds"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"version": 99, "pipelines": []}"#).unwrap();
    let out = toc(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    let v: serde_json::Value = serde_json::from_str(err.trim()).expect("stderr is JSON");
    assert_eq!(v["kind"], "config");
}

#[test]
fn unknown_pipeline_is_a_config_error() {
    let out = toc(&[
        "train", "--pipeline", "bogus", "--data", "/tmp/none.tcds",
        "--seed", "1", "--out", "/tmp/never",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_input_file_is_a_runtime_error() {
    let dir = TempDir::new().unwrap();
    let out = toc(&[
        "eval", "--model", dir.path().join("nope").to_str().unwrap(),
        "--data", dir.path().join("nope.tcds").to_str().unwrap(), "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    let v: serde_json::Value = serde_json::from_str(err.trim()).expect("stderr is JSON");
    assert_eq!(v["kind"], "runtime");
}

#[test]
fn sweep_writes_deterministic_outputs_and_report_rerenders() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"{
          "version": 1,
          "pipelines": ["toc"],
          "snr_s_grid": [10.0],
          "snr_c_grid": [0.0, 10.0],
          "seeds": [1],
          "attacks": [],
          "train": { "epochs": 2, "batch_size": 64, "lr": 0.001 },
          "n_samples": 300,
          "phase_impairment": false,
          "output_dir": "unused",
          "workers": 1
        }"#,
    )
    .unwrap();

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = toc(&[
            "sweep", "--config", cfg.to_str().unwrap(),
            "--output-dir", out_dir.to_str().unwrap(),
        ]);
        stdout_json(&out);
    }
    for name in ["results.csv", "results.json"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    assert!(out_a.join("accuracy_vs_snrc_snrs_10.svg").exists());

    let rep = dir.path().join("rep");
    let out = toc(&[
        "report", "--results", out_a.to_str().unwrap(), "--kind", "csv",
        "--out", rep.to_str().unwrap(), "--group-by", "pipeline,snr_c",
    ]);
    stdout_json(&out);
    let rendered = std::fs::read(rep.join("results.csv")).unwrap();
    let original = std::fs::read(out_a.join("results.csv")).unwrap();
    assert_eq!(rendered, original, "re-rendered CSV must match the original");
    assert!(rep.join("summary.csv").exists());
}

#[test]
fn output_dir_env_var_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"{
          "version": 1,
          "pipelines": ["no_channel"],
          "snr_s_grid": [10.0],
          "snr_c_grid": [10.0],
          "seeds": [1],
          "train": { "epochs": 1, "batch_size": 64, "lr": 0.001 },
          "n_samples": 200,
          "output_dir": "unused"
        }"#,
    )
    .unwrap();
    let env_out = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_toc"))
        .args(["sweep", "--config", cfg.to_str().unwrap()])
        .env("TCOMM_OUT", &env_out)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(Path::new(&env_out).join("results.csv").exists());
}
