//! Black-box tests of the `isoconvex` binary: exit codes, file outputs, and
//! reproducibility of seeded runs.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isoconvex"))
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

const CUBE_JSON: &str = r#"{"type":"vpolytope","vertices":[
  [-0.5,-0.5,-0.5],[0.5,-0.5,-0.5],[-0.5,0.5,-0.5],[0.5,0.5,-0.5],
  [-0.5,-0.5,0.5],[0.5,-0.5,0.5],[-0.5,0.5,0.5],[0.5,0.5,0.5]]}"#;

#[test]
fn isotropy_cube_reports_l() {
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("cube.json");
    write(&body, CUBE_JSON);
    let out = bin()
        .args(["isotropy", "--body"])
        .arg(&body)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let l = report["l_k"].as_f64().unwrap();
    assert!((l - 0.28867513459481287).abs() < 1e-9);
}

#[test]
fn isotropy_bad_inputs_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = dir.path().join("bad.json");
    write(&malformed, "{ not json");
    let out = bin()
        .args(["isotropy", "--body"])
        .arg(&malformed)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    // Rank-deficient vertex set: degenerate geometry.
    let flat = dir.path().join("flat.json");
    write(
        &flat,
        r#"{"type":"vpolytope","vertices":[[0,0],[1,0],[2,0],[3,0]]}"#,
    );
    let out = bin().args(["isotropy", "--body"]).arg(&flat).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_contradiction_rows() {
    let out = bin()
        .args(["verify", "--suite", "contradiction", "--n", "20"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines[0], "n,c_out,c_in,verdict");
    assert_eq!(lines.len(), 20); // header + n = 2..20
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn verify_caps_and_prop4_pass() {
    let dir = tempfile::tempdir().unwrap();
    let caps_csv = dir.path().join("caps.csv");
    let out = bin()
        .args(["verify", "--suite", "caps", "--n", "3", "--out"])
        .arg(&caps_csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&caps_csv).unwrap();
    assert!(text.starts_with("n,R,a,b,quantity,closed,oracle,rel_err,order_fit"));
    assert!(text.contains("psi_lambda"));

    let out = bin().args(["verify", "--suite", "prop4"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# order_fit,"));
}

#[test]
fn verify_lemma5_passes() {
    let out = bin().args(["verify", "--suite", "lemma5"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn search_round_trip_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    write(
        &config,
        r#"{"dim":2,"vertex_count":8,"mode":"minimize","symmetric":false,
            "initial_step":0.3,"step_decay":0.7,"step_floor":1e-6,
            "max_iterations":200,"seed":7,"allow_vertex_count_change":false}"#,
    );
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out_path in [&out_a, &out_b] {
        let out = bin()
            .args(["search", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out_path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stdout).contains("final L_K"));
    }
    assert_eq!(
        std::fs::read_to_string(&out_a).unwrap(),
        std::fs::read_to_string(&out_b).unwrap()
    );

    // vertex_count below n+1 is an input error.
    let bad = dir.path().join("bad.json");
    write(
        &bad,
        r#"{"dim":2,"vertex_count":2,"mode":"minimize","symmetric":false,
            "initial_step":0.3,"step_decay":0.7,"step_floor":1e-6,
            "max_iterations":10,"seed":0,"allow_vertex_count_change":false}"#,
    );
    let out = bin()
        .args(["search", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("x.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_are_rejected() {
    let out = bin()
        .args(["verify", "--suite", "prop4", "--bogus"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
