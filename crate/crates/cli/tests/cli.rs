use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn model(name: &str) -> String {
    root().join("../../models").join(name).display().to_string()
}

fn fixture(name: &str) -> String {
    root().join("tests/fixtures").join(name).display().to_string()
}

fn psurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psurf")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn check_bundled_models() {
    for m in ["mkdv.model", "sine-gordon.model"] {
        let o = psurf(&["check", "--model", &model(m)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let report = json(&o);
        assert_eq!(report["passed"], true);
        assert_eq!(report["residuals"].as_object().unwrap().len(), 9);
        assert_eq!(report["meta"]["model_sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn check_flags_flipped_b() {
    let o = psurf(&["check", "--model", &fixture("mkdv-flipped-b.model"), "--seed", "3"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("residual qr.2 is not zero"));
    let report = json(&o);
    assert_eq!(report["residuals"]["qr.2"]["onshell_zero"], false);
    assert!(report["residuals"]["qr.2"]["probe"].as_f64().unwrap() > 0.0);
    assert_eq!(report["meta"]["seed"], 3);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&psurf(&["check", "--model", "/nonexistent.model"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.model");
    std::fs::write(&bad, "[model]\n[qr]\nq = \"q\"\n").unwrap();
    assert_eq!(code(&psurf(&["check", "--model", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&psurf(&["frobnicate"])), 2);
    assert_eq!(code(&psurf(&["bench", "--model", &model("mkdv.model"), "--grid", "40x500"])), 2);
}

#[test]
fn laws_for_mkdv() {
    let o = psurf(&["laws", "--model", &model("mkdv.model"), "--n", "6"]);
    assert_eq!(code(&o), 0);
    let laws = json(&o)["laws"].as_array().unwrap().clone();
    assert_eq!(laws.len(), 6);
    for l in &laws {
        let n = l["n"].as_u64().unwrap();
        assert_eq!(l["trivial"], n % 2 == 0);
        assert_eq!(l["verified"], true);
    }
    assert_eq!(laws[0]["density"], "-q^2");
}

#[test]
fn laws_for_sine_gordon() {
    let o = psurf(&["laws", "--model", &model("sine-gordon.model"), "--n", "4"]);
    assert_eq!(code(&o), 0);
    let report = json(&o);
    assert_eq!(report["cancelled"], serde_json::json!([1]));
    let laws = report["laws"].as_array().unwrap();
    assert_eq!(laws.iter().map(|l| l["n"].as_u64().unwrap()).collect::<Vec<_>>(), vec![2, 3, 4]);
    assert_eq!(laws[0]["flux"], "1/2*q*sin(u)");
}

#[test]
fn laws_zero_is_empty() {
    let o = psurf(&["laws", "--model", &model("mkdv.model"), "--n", "0"]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["laws"].as_array().unwrap().is_empty());
}

#[test]
fn laws_refuse_a_broken_model() {
    assert_eq!(code(&psurf(&["laws", "--model", &fixture("mkdv-flipped-b.model")])), 1);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = psurf(&["bench", "--model", &model("mkdv.model"), "--tmax", "0.2", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        (std::fs::read(out.join("drift.json")).unwrap(), std::fs::read(out.join("drift.csv")).unwrap())
    };
    assert_eq!(run("a"), run("b"));
    let a = psurf(&["laws", "--model", &model("sine-gordon.model"), "--n", "5"]);
    let b = psurf(&["laws", "--model", &model("sine-gordon.model"), "--n", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn riccati_mkdv_soliton_passes() {
    let o = psurf(&["riccati", "--model", &model("mkdv.model"), "--eta", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# psurf"));
    assert_eq!(lines.next().unwrap(), "check,eta,h,mismatch,order");
    assert_eq!(text.lines().filter(|l| l.starts_with("conservation.gamma,")).count(), 4);
}

#[test]
fn riccati_kink_at_eta_one_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = psurf(&["riccati", "--model", &model("sine-gordon.model"), "--eta", "1", "--out", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&std::fs::read(dir.path().join("riccati.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["equivalences"][0]["angle"].as_f64().unwrap() < 1e-7);
}

#[test]
fn riccati_names_theta_for_perturbed_model() {
    let o = psurf(&["riccati", "--model", &fixture("mkdv-perturbed-b.model"), "--solution", "mkdv-soliton", "--eta", "3"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("theta_closed"), "{}", stderr(&o));
}

#[test]
fn bench_gaussian_drifts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = psurf(&["bench", "--model", &model("mkdv.model"), "--config", &fixture("gaussian.toml"), "--out", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&std::fs::read(dir.path().join("drift.json")).unwrap()).unwrap();
    let entries = report["report"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 5);
    for e in entries {
        if e["trivial"] == false {
            assert!(e["drift"].as_f64().unwrap() < 1e-6);
        }
    }
    let csv = std::fs::read_to_string(dir.path().join("drift.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "t,I_1,I_2,I_3,I_4,I_5");
    assert_eq!(csv.lines().count(), 2 + 11);
}

#[test]
fn bench_exact_history() {
    let o = psurf(&["bench", "--model", &model("mkdv.model"), "--exact"]);
    assert_eq!(code(&o), 0);
    for e in json(&o)["report"]["entries"].as_array().unwrap() {
        assert!(e["drift"].as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn bench_rejects_unstable_step() {
    let o = psurf(&["bench", "--model", &model("mkdv.model"), "--dt", "0.5"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("stability bound"));
}
