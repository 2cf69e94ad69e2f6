use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_chrestenson"));
    c.env_remove("CHRESTENSON_OUT_DIR");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn lemma1_then_verify_then_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["lemma1", "--order", "2", "--gamma", "1", "--n0", "2", "--eps", "0.4", "--interval", "1:1", "--out", "cert.json"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cert = read(&dir.path().join("cert.json"));
    assert_eq!(cert["params"]["nu0"], 2);
    assert_eq!(cert["params"]["n"], 13);

    let o = run(dir.path(), &["verify", "--in", "cert.json"]);
    assert_eq!(code(&o), 0);

    let text = std::fs::read_to_string(dir.path().join("cert.json")).unwrap();
    let tampered = text.replacen("3.7500000000000000e-1", "4.7500000000000000e-1", 1);
    assert_ne!(tampered, text);
    std::fs::write(dir.path().join("bad.json"), tampered).unwrap();
    let o = run(dir.path(), &["verify", "--in", "bad.json"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn transform_round_trip_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["transform", "--order", "3", "--level", "4", "--gen", "rand", "--seed", "5", "--inverse"]);
    assert_eq!(code(&o), 2, "--inverse without --in is a usage error");

    let f = serde_json::json!({
        "order": 3,
        "level": 2,
        "values": [1.0, -2.0, 0.5, 0.0, 3.0, 1.0, 1.0, 1.0, -1.0],
    });
    std::fs::write(dir.path().join("f.json"), f.to_string()).unwrap();
    let o = run(
        dir.path(),
        &["transform", "--order", "3", "--level", "2", "--method", "fast", "--in", "f.json", "--out", "spec.json"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let spec = read(&dir.path().join("spec.json"));
    assert_eq!(spec["order"], 3);

    let o = run(dir.path(), &["transform", "--inverse", "--in", "spec.json", "--level", "2", "--out", "back.json"]);
    assert_eq!(code(&o), 0);
    let back = read(&dir.path().join("back.json"));
    for (x, y) in back["values"].as_array().unwrap().iter().zip(f["values"].as_array().unwrap()) {
        let re = x[0].to_string().parse::<f64>().unwrap();
        assert!((re - y.as_f64().unwrap()).abs() < 1e-12);
    }

    // the same input always gives the same bytes
    let o = run(dir.path(), &["transform", "--order", "3", "--level", "2", "--in", "f.json", "--out", "spec2.json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        std::fs::read(dir.path().join("spec.json")).unwrap(),
        std::fs::read(dir.path().join("spec2.json")).unwrap()
    );
}

#[test]
fn greedy_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["greedy", "--gen", "sign", "--level", "4", "--m-max", "5", "--out", "curve.csv"]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "m,error_p,partial_sum_norm_1");
    assert_eq!(lines.len(), 7);
    assert_eq!(code(&run(dir.path(), &["greedy", "--gen", "sign", "--p", "3"])), 2);
}

#[test]
fn lemma2_and_correct_certificates_verify() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["lemma2", "--gen", "centered", "--level", "3", "--eps", "0.3", "--out", "l2.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&run(dir.path(), &["verify", "--in", "l2.json"])), 0);

    let o = run(
        dir.path(),
        &["correct", "--gen", "linear", "--level", "3", "--eps", "0.25", "--profile", "geometric", "--out", "c.json"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&dir.path().join("c.json"))["kind"], "correction");
    assert_eq!(code(&run(dir.path(), &["verify", "--in", "c.json"])), 0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&run(dir.path(), &["lemma1", "--gamma", "1", "--eps", "1.5", "--interval", "1:1"])), 2);
    assert_eq!(code(&run(dir.path(), &["lemma1", "--gamma", "0", "--eps", "0.5", "--interval", "1:1"])), 2);
    assert_eq!(code(&run(dir.path(), &["verify", "--in", "missing.json"])), 2);
    // the verbatim budgets cannot be met
    let o = run(dir.path(), &["correct", "--gen", "linear", "--level", "4", "--eps", "0.25"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
    assert_eq!(code(&run(dir.path(), &["transform", "--gen", "rand", "--level", "9", "--method", "naive"])), 3);
}

#[test]
fn output_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let o = bin()
        .current_dir(dir.path())
        .env("CHRESTENSON_OUT_DIR", out.path())
        .args(["lemma1", "--gamma", "1", "--eps", "0.4", "--interval", "1:1", "--out", "cert.json"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(out.path().join("cert.json").exists());
    assert!(!dir.path().join("cert.json").exists());
}

#[test]
fn selftest_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["selftest", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let o = run(dir.path(), &["bench", "--order", "3", "--level", "6", "--repeats", "1"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("cells=729"));
}
