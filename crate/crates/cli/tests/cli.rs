use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SQUEEZE: &str = r#"{"dim":1,"U":{"rows":1,"cols":1,"data":[[[1.1276259652063807,0]]]},"V":{"rows":1,"cols":1,"data":[[[0.5210953054937474,0]]]}}"#;
const STATE: &str =
    r#"{"dim":1,"Z":{"rows":1,"cols":1,"data":[[[0.3,0.1]]]},"f":[[0.4,-0.2]],"log_amp":[0,0]}"#;
const VACUUM2: &str = r#"{"dim":2,"Z":{"rows":2,"cols":2,"data":[[[0,0],[0,0]],[[0,0],[0,0]]]},"f":[[0,0],[0,0]],"log_amp":[0,0]}"#;

fn uc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("uc runs")
}

fn json_out(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sq.json"), SQUEEZE).unwrap();
    fs::write(dir.path().join("x.json"), STATE).unwrap();
    fs::write(dir.path().join("vac2.json"), VACUUM2).unwrap();
    dir
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn overlap_with_oracle_agrees() {
    let dir = workspace();
    let v = json_out(&uc(
        dir.path(),
        &[
            "--format",
            "json",
            "overlap",
            "--state-a",
            "x.json",
            "--state-b",
            "x.json",
            "--oracle",
        ],
    ));
    let (re, im) = c(&v["overlap"]);
    assert!(re > 1.0 && im.abs() < 1e-14);
    assert_eq!(v["oracle"]["agrees"], true);
    assert!(v["oracle"]["rel_diff"].as_f64().unwrap() < 1e-6);
}

#[test]
fn overlap_dimension_mismatch_is_input_error() {
    let dir = workspace();
    let out = uc(
        dir.path(),
        &["overlap", "--state-a", "x.json", "--state-b", "vac2.json"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn apply_squeeze_to_vacuum() {
    let dir = workspace();
    fs::write(
        dir.path().join("vac.json"),
        r#"{"dim":1,"Z":{"rows":1,"cols":1,"data":[[[0,0]]]},"f":[[0,0]],"log_amp":[0,0]}"#,
    )
    .unwrap();
    let v = json_out(&uc(
        dir.path(),
        &[
            "--format",
            "json",
            "apply",
            "--symplectic",
            "sq.json",
            "--state",
            "vac.json",
        ],
    ));
    let (z, _) = c(&v["Z"]["data"][0][0]);
    assert!((z - 0.5f64.tanh()).abs() < 1e-12);
    let (la, _) = c(&v["log_amp"]);
    assert!((la.exp() - 0.5f64.cosh().powf(-0.5)).abs() < 1e-12);
}

#[test]
fn compose_reports_product_and_multiplier() {
    let dir = workspace();
    let v = json_out(&uc(
        dir.path(),
        &[
            "--format", "json", "compose", "--a", "sq.json", "--b", "sq.json",
        ],
    ));
    let (u, _) = c(&v["product"]["U"]["data"][0][0]);
    assert!((u - 1.0f64.cosh()).abs() < 1e-12);
    let (re, im) = c(&v["multiplier"]);
    assert!((re.hypot(im) - 1.0).abs() < 1e-12);
}

#[test]
fn run_circuit_with_raw_symplectic() {
    let dir = workspace();
    fs::create_dir(dir.path().join("circ")).unwrap();
    fs::copy(dir.path().join("sq.json"), dir.path().join("circ/sq.json")).unwrap();
    fs::write(
        dir.path().join("circ/c.txt"),
        "# squeezed then displaced\nSYMP(\"sq.json\");\nD(0, 1.0, 0.0)\n",
    )
    .unwrap();
    let v = json_out(&uc(
        dir.path(),
        &[
            "--format",
            "json",
            "run",
            "--circuit",
            "circ/c.txt",
            "--dim",
            "1",
            "--normal-form",
        ],
    ));
    let (z, _) = c(&v["state"]["Z"]["data"][0][0]);
    assert!((z - 0.5f64.tanh()).abs() < 1e-12);
    let (h, _) = c(&v["normal_form"]["h"][0]);
    assert!((h - 1.0).abs() < 1e-12);
}

#[test]
fn run_syntax_error_exit_code() {
    let dir = workspace();
    fs::write(dir.path().join("bad.txt"), "S(0, 0.5").unwrap();
    let out = uc(dir.path(), &["run", "--circuit", "bad.txt", "--dim", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1:2"));
}

#[test]
fn run_mode_out_of_range() {
    let dir = workspace();
    fs::write(dir.path().join("c.txt"), "BS(0, 2, 0.3, 0.0)").unwrap();
    let out = uc(dir.path(), &["run", "--circuit", "c.txt", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_symplectic_rejected() {
    let dir = workspace();
    fs::write(
        dir.path().join("bad.json"),
        r#"{"dim":1,"U":{"rows":1,"cols":1,"data":[[[1.0,0]]]},"V":{"rows":1,"cols":1,"data":[[[0.5,0]]]}}"#,
    )
    .unwrap();
    let out = uc(
        dir.path(),
        &["apply", "--symplectic", "bad.json", "--state", "x.json"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn takagi_reconstructs() {
    let dir = workspace();
    fs::write(
        dir.path().join("a.json"),
        r#"{"rows":2,"cols":2,"data":[[[1,0],[0.5,0.2]],[[0.5,0.2],[-0.3,1]]]}"#,
    )
    .unwrap();
    let v = json_out(&uc(
        dir.path(),
        &["--format", "json", "takagi", "--matrix", "a.json"],
    ));
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
    let alphas: Vec<f64> = v["alphas"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_f64().unwrap())
        .collect();
    assert!(alphas[0] >= alphas[1] && alphas[1] >= 0.0);
}

#[test]
fn takagi_rejects_non_symmetric() {
    let dir = workspace();
    fs::write(
        dir.path().join("a.json"),
        r#"{"rows":2,"cols":2,"data":[[[1,0],[0.5,0]],[[0.1,0],[1,0]]]}"#,
    )
    .unwrap();
    let out = uc(dir.path(), &["takagi", "--matrix", "a.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn free_field_demo_at_zero_time_is_identity() {
    let dir = workspace();
    fs::write(dir.path().join("m.json"), "[1.5]").unwrap();
    let v = json_out(&uc(
        dir.path(),
        &[
            "--format",
            "json",
            "demo",
            "free-field",
            "--symplectic",
            "sq.json",
            "--spectrum",
            "m.json",
            "--t",
            "0",
        ],
    ));
    let (u, ui) = c(&v["U"]["data"][0][0]);
    let (w, wi) = c(&v["V"]["data"][0][0]);
    assert!((u - 1.0).abs() < 1e-12 && ui.abs() < 1e-12);
    assert!(w.abs() < 1e-12 && wi.abs() < 1e-12);
}

#[test]
fn verify_single_suite_text_and_json() {
    let dir = workspace();
    let out = uc(
        dir.path(),
        &["verify", "--suite", "siegel", "--trials", "10"],
    );
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS siegel/cocycle"));
    let v = json_out(&uc(
        dir.path(),
        &[
            "--format",
            "json",
            "--seed",
            "7",
            "verify",
            "--suite",
            "symplectic",
            "--trials",
            "5",
        ],
    ));
    assert_eq!(v["seed"], 7);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn verify_failure_exit_code() {
    let dir = workspace();
    let out = uc(
        dir.path(),
        &[
            "--tol",
            "1e-30",
            "verify",
            "--suite",
            "symplectic",
            "--trials",
            "5",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_suite_and_missing_file() {
    let dir = workspace();
    assert_eq!(
        uc(dir.path(), &["verify", "--suite", "nope"]).status.code(),
        Some(2)
    );
    let out = uc(
        dir.path(),
        &["apply", "--symplectic", "missing.json", "--state", "x.json"],
    );
    assert_eq!(out.status.code(), Some(2));
}
