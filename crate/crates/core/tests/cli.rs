use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use convlattice::inference::{type1_rule, RuleBase, Universe};
use convlattice::membership::MembershipFunction;
use convlattice::scalar_ops::{grid_point, ScalarOp};
use serde_json::Value;
use tempfile::TempDir;

const TRIANGLE: &str = r#"{"repr":"piecewise","points":[[0,0],[0.2,0],[0.5,1],[0.8,0],[1,0]],"segments":["linear","linear","linear","linear"]}"#;
const RAMP: &str = r#"{"repr":"piecewise","points":[[0,0],[0.3,1],[0.6,1],[0.9,0],[1,0]],"segments":["linear","linear","linear","linear"]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convlattice")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_reports_left_continuity() {
    let out = run(&["classify", "--star", "product", "--tri", "drastic"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["is_tnorm_on_L"], false);
    assert!(v["reason"].as_str().unwrap().contains("left-continuous"));

    let ok = run(&["classify", "--star", "minimum", "--tri", "product"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["is_tnorm_on_L"], true);
}

#[test]
fn classify_conorm_flag() {
    let out = run(&["classify", "--star", "maximum", "--tri", "product", "--conorm"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["is_tconorm_on_L"], true);
}

#[test]
fn verify_border_witness_fails_with_gap() {
    let out = run(&["verify", "--star", "minimum", "--tri", "drastic", "--witness", "border", "--sample", "2"]);
    assert_ne!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["witness_gap"]["gap"].as_f64().unwrap() >= 0.28);
    assert_eq!(v["report"]["associative_ok"], false);
}

#[test]
fn verify_continuous_pair_passes() {
    let out = run(&["verify", "--star", "minimum", "--tri", "lukasiewicz", "--sample", "3", "--n", "129"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn fast_and_grid_agree() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", TRIANGLE);
    let g = write(&dir, "g.json", RAMP);
    let conv = |method: &str| -> MembershipFunction {
        let out = run(&[
            "conv", "--star", "minimum", "--tri", "product", "--f", s(&f), "--g", s(&g), "--method", method, "--n",
            "257",
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        serde_json::from_slice(&out.stdout).unwrap()
    };
    let (fast, grid) = (conv("fast"), conv("grid"));
    for i in 0..257 {
        let x = grid_point(i, 257);
        assert!((fast.eval(x) - grid.eval(x)).abs() <= 0.02, "at {x}");
    }
}

#[test]
fn fast_method_needs_border_continuity() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", TRIANGLE);
    let out = run(&["conv", "--star", "minimum", "--tri", "drastic", "--f", s(&f), "--g", s(&f), "--method", "fast"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: "));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", TRIANGLE);
    let g = write(&dir, "g.json", RAMP);
    let conv = ["conv", "--star", "product", "--tri", "product", "--f", s(&f), "--g", s(&g), "--n", "129"];
    assert_eq!(run(&conv).stdout, run(&conv).stdout);
    let verify = ["verify", "--star", "product", "--tri", "minimum", "--sample", "3", "--seed", "9", "--n", "65"];
    assert_eq!(run(&verify).stdout, run(&verify).stdout);
}

#[test]
fn order_verdicts() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", TRIANGLE);
    let one = write(&dir, "one.json", r#"{"repr":"piecewise","points":[[0,0],[1,1]],"segments":["constant-left"]}"#);
    for method in ["envelopes", "cuts"] {
        assert_eq!(run(&["order", "--f", s(&f), "--g", s(&one), "--method", method]).status.code(), Some(0));
        let no = run(&["order", "--f", s(&one), "--g", s(&f), "--method", method]);
        assert_eq!(no.status.code(), Some(1));
        assert_eq!(json(&no)["holds"], false);
    }
}

#[test]
fn error_kinds_have_distinct_codes() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", TRIANGLE);
    let bad = write(&dir, "bad.json", "{not json");
    let bimodal = write(
        &dir,
        "bimodal.json",
        r#"{"repr":"piecewise","points":[[0,0],[0.2,1],[0.5,0],[0.8,1],[1,0]],"segments":["linear","linear","linear","linear"]}"#,
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["classify", "--star", "product"]).status.code(), Some(2));
    assert_eq!(run(&["order", "--f", s(&f), "--g", s(&bimodal)]).status.code(), Some(2));
    assert_eq!(run(&["order", "--f", s(&f), "--g", s(&missing)]).status.code(), Some(4));
    assert_eq!(run(&["order", "--f", s(&f), "--g", s(&bad)]).status.code(), Some(5));
    assert_eq!(run(&["classify", "--star", "bogus", "--tri", "minimum"]).status.code(), Some(5));
}

#[test]
fn infer_from_crisp_value() {
    let dir = TempDir::new().unwrap();
    let u = Universe::new(0.0, 1.0, 21).unwrap();
    let low = |x: f64| (1.0 - 2.0 * x).max(0.0);
    let high = |x: f64| (2.0 * x - 1.0).max(0.0);
    let rules = vec![type1_rule(&u, &u, low, high).unwrap(), type1_rule(&u, &u, high, low).unwrap()];
    let rb = RuleBase::new(u, u, rules, ScalarOp::Minimum, ScalarOp::Minimum).unwrap();
    let path = write(&dir, "rb.json", &serde_json::to_string(&rb).unwrap());
    let out_path = dir.path().join("out.json");
    let out = run(&["infer", "--rulebase", s(&path), "--crisp", "0.05", "--spread", "0.1", "--out", s(&out_path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["format_version"], 1);
    assert!(v["defuzzified"].as_f64().unwrap() > 0.5);
}

#[test]
fn plot_emits_csv() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", TRIANGLE);
    let csv = dir.path().join("f.csv");
    assert_eq!(run(&["plot", "--f", s(&f), "--n", "11", "--csv", s(&csv)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).collect();
    assert_eq!(rows.len(), 11);
}
