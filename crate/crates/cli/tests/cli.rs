use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use prodnet_cli::{read_outputs, RunManifest};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn prodnet(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prodnet"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("PRODNET_OUT_DIR")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = prodnet(dir.path(), &["validate", "--economy", path(&data("figure1a.json"))]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = prodnet(dir.path(), &["validate", "--economy", path(&data("negative.json"))]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL"));
    let missing = prodnet(dir.path(), &["validate", "--economy", "no-such-file.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let no_flag = prodnet(dir.path(), &["validate"]);
    assert_eq!(no_flag.status.code(), Some(2));
}

#[test]
fn tolerance_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = prodnet(
        dir.path(),
        &["--tolerance", "row_sum=1e-6", "validate", "--economy", path(&data("figure1b.csv"))],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = RunManifest::load(&dir.path().join("manifest.json")).unwrap();
    let text = serde_json::to_value(&m.config).unwrap();
    assert_eq!(text["tolerances"]["row_sum"], 1e-6);
    let bogus = prodnet(dir.path(), &["--tolerance", "nonsense=1", "validate", "--economy", path(&data("figure1a.json"))]);
    assert_eq!(bogus.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"trials": 7, "n": 3, "seed": 11}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = prodnet(&out_dir, &["--config", path(&config), "experiment", "hulten", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = RunManifest::load(&out_dir.join("manifest.json")).unwrap();
    let v = serde_json::to_value(&m.config).unwrap();
    assert_eq!(v["trials"], 7);
    assert_eq!(v["max_n"], 3);
    assert_eq!(v["seed"], 5);

    fs::write(&config, r#"{"unknown_key": 1}"#).unwrap();
    let bad = prodnet(&out_dir, &["--config", path(&config), "experiment", "figure1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn replay_detects_changed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let economy = dir.path().join("economy.json");
    fs::copy(data("figure1b.json"), &economy).unwrap();
    let first = dir.path().join("first");
    let out = prodnet(&first, &["analyze", "--economy", path(&economy), "--beta", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let second = dir.path().join("second");
    let manifest = first.join("manifest.json");
    let replay = prodnet(&second, &["replay", "--manifest", path(&manifest)]);
    assert_eq!(replay.status.code(), Some(0));
    assert_eq!(read_outputs(&first).unwrap(), read_outputs(&second).unwrap());

    fs::write(&economy, fs::read_to_string(data("figure1a.json")).unwrap()).unwrap();
    let stale = prodnet(&dir.path().join("third"), &["replay", "--manifest", path(&manifest)]);
    assert_eq!(stale.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&stale.stderr).contains("changed"));
}

#[test]
fn simulate_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = prodnet(
        dir.path(),
        &[
            "simulate",
            "--economy",
            path(&data("figure1b.json")),
            "--tfp-config",
            path(&data("tfp.json")),
            "--mode",
            "stocks",
            "--t-end",
            "20",
            "--samples",
            "10",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,Z_1,Z_2,gamma_1,gamma_2"));
    assert_eq!(lines.count(), 11);
}
