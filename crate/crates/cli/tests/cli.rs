use std::path::{Path, PathBuf};
use std::process::Command;

use edplab_cli::run;

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn capture(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut full = vec!["edplab"];
    full.extend_from_slice(args);
    let code = run(full, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_edplab"))
        .args(args)
        .current_dir(workspace())
        .output()
        .unwrap()
}

#[test]
fn exit_codes_follow_outcomes() {
    assert_eq!(binary(&["lemmas", "--instances", "50"]).status.code(), Some(0));
    // Fidelity monotonicity misses 1e-15 by rounding within 1000 instances.
    assert_eq!(
        binary(&["lemmas", "--tolerance", "1e-15", "--format", "csv"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        binary(&["lemmas", "--out", "/nonexistent-dir/report.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        binary(&["bounds", "--model", "measure-r", "--n", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        binary(&["sweep", "--model", "bitflip", "--n", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(binary(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_spec_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    std::fs::write(&spec, r#"{"n": 2, "rounds": [{"party": "alice", "kraus": 3}]}"#).unwrap();
    let out = binary(&[
        "protocol",
        "--spec",
        spec.to_str().unwrap(),
        "--model",
        "depolar",
        "--p",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rounds[0].kraus"));
}

#[test]
fn capacity_is_a_parameter_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_edplab"))
        .args(["sweep", "--model", "measure-r", "--n", "3", "--r", "1"])
        .env("EDPLAB_MAX_QUBITS", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("capacity"));
}

#[test]
fn bounds_row_for_measure_r() {
    let (code, body) = capture(&[
        "bounds",
        "--model",
        "measure-r",
        "--n",
        "2",
        "--r",
        "1",
        "--restarts",
        "4",
    ]);
    assert_eq!(code, 0);
    let rows: serde_json::Value = serde_json::from_str(&body).unwrap();
    let row = &rows[0];
    assert_eq!(row["theorem"], "neg_measure_r");
    assert_eq!(row["bound"], 0.75);
    assert_eq!(row["pass"], true);
    assert_eq!(row["search"]["restart_values"].as_array().unwrap().len(), 4);
}

#[test]
fn protocol_file_on_depolarization() {
    let spec = workspace().join("protocols/first_pair.json");
    let (code, body) = capture(&[
        "protocol",
        "--spec",
        spec.to_str().unwrap(),
        "--model",
        "depolar",
        "--n",
        "2",
        "--p",
        "0.4",
    ]);
    assert_eq!(code, 0);
    let eval: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert!((eval["fidelity"].as_f64().unwrap() - 0.7).abs() < 1e-10);
}

#[test]
fn protocol_with_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    std::fs::write(&model, r#"{"model": "measure_r", "n": 2, "r": 2}"#).unwrap();
    let spec = workspace().join("protocols/random_pair.json");
    let (code, body) = capture(&[
        "protocol",
        "--spec",
        spec.to_str().unwrap(),
        "--model-file",
        model.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    // One row per degree-2 indicator vector: 2² · C(2,2) = 4.
    assert_eq!(body.lines().count(), 1 + 4);
}

#[test]
fn fidelity_sweep_over_rounds() {
    let (code, body) = capture(&[
        "sweep",
        "--model",
        "fidelity",
        "--n",
        "3",
        "--s",
        "1..3",
        "--epsilon",
        "0.25",
    ]);
    assert_eq!(code, 0);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&body).unwrap();
    assert_eq!(rows.len(), 3);
    for (row, s) in rows.iter().zip(1..) {
        assert_eq!(row["params"]["s"], s);
        if s < 3 {
            let bound = 1.0 - 0.5f64.powi(s) / 0.75;
            assert!(row["achieved"].as_f64().unwrap() >= bound - 1e-9);
            assert_eq!(row["pass"], true);
        } else {
            assert!(row["pass"].is_null());
        }
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "model = depolarization\nn = 1..2\np = 0..1:0.5\nformat = json\n").unwrap();
    let (code, body) = capture(&["sweep", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(body.starts_with("theorem,"));
    assert_eq!(body.lines().count(), 1 + 2 * 3);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "bounds".to_string(),
            "--model".into(),
            "depolarization".into(),
            "--n".into(),
            "1".into(),
            "--p".into(),
            "0.5".into(),
            "--ancillas".into(),
            "0,1".into(),
            "--restarts".into(),
            "6".into(),
            "--seed".into(),
            "17".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(
        binary(&args(&a).iter().map(String::as_str).collect::<Vec<_>>())
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        binary(&args(&b).iter().map(String::as_str).collect::<Vec<_>>())
            .status
            .code(),
        Some(0)
    );
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn bundled_protocols_build() {
    for entry in std::fs::read_dir(workspace().join("protocols")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let spec = edplab_core::locc::ProtocolSpec::from_json(&text).unwrap();
        spec.build().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
