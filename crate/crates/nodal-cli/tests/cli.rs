use std::process::{Command, Output};

use serde_json::Value;

fn nodal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodal")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = nodal(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn e4_tends_to_one_high_in_the_half_plane() {
    let (re, im) = complex(&json(&["eval", "E4", "--tau", "0+10i"])["value"]);
    assert!((re - 1.0).abs() < 1e-12 && im.abs() < 1e-12);
}

#[test]
fn middle_half_period_vanishes_at_square_modulus() {
    let (re, im) = complex(&json(&["eval", "e2", "--tau", "0+1i"])["value"]);
    assert!(re.abs() < 1e-12 && im.abs() < 1e-12);
}

#[test]
fn potential_at_reference_point() {
    // 1/2 t1^2 t3 + t1 t2^2 - t2^4 E2 / 24 at (-1, 1, i): t3 = 2 pi i tau = -2 pi, E2(i) = 3 / pi
    let (re, im) = complex(&json(&["eval", "potential", "--t", "-1,1,0+1i"])["value"]);
    let pi = std::f64::consts::PI;
    assert!((re - (-pi - 1.0 - 1.0 / (8.0 * pi))).abs() < 1e-12, "{re}");
    assert!(im.abs() < 1e-12);
}

#[test]
fn lattice_suite_passes() {
    let out = nodal(&["verify", "lattice"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
}

#[test]
fn identities_suite_passes_and_is_reproducible() {
    let args = ["verify", "identities", "--samples", "100", "--seed", "7"];
    let a = nodal(&args);
    let b = nodal(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["samples"], 100);
}

#[test]
fn different_seeds_give_different_reports() {
    let a = nodal(&["verify", "identities", "--samples", "10", "--seed", "1"]);
    let b = nodal(&["verify", "identities", "--samples", "10", "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn braid_relation_through_the_cli() {
    let lhs = json(&["braid", "s1 s2 s1"]);
    let rhs = json(&["braid", "s2 s1 s2"]);
    assert_eq!(lhs["result"], rhs["result"]);
    assert_eq!(lhs["exceptional"], Value::Bool(true));
    let back = json(&["braid", "s1 s1^-1 [2,0,0]"]);
    assert_eq!(back["result"], back["start"]);
}

#[test]
fn braid_on_simples_and_explicit_start() {
    let s = json(&["braid", "s2", "--start", "S"]);
    assert_eq!(s["exceptional"], Value::Bool(true));
    let explicit = json(&["braid", "s1", "--start", "1,0,0;0,1,0;0,0,1"]);
    assert_eq!(explicit["result"], json(&["braid", "s1"])["result"]);
    let not_exceptional = nodal(&["braid", "s1", "--start", "1,0,0;1,0,0;0,0,1"]);
    assert_eq!(not_exceptional.status.code(), Some(2));
}

#[test]
fn ll_round_trip() {
    let fwd = json(&["ll", "forward", "--s", "0.3-0.1i,0.9+0.2i,0.1+1.1i"]);
    let arg = fwd["arg"].as_str().unwrap().to_string();
    let inv = json(&["ll", "inverse", "--u", &arg]);
    let again = json(&["ll", "forward", "--s", inv["arg"].as_str().unwrap()]);
    for k in 0..3 {
        let (a, b) = complex(&fwd["u"][k]);
        let (c, d) = complex(&again["u"][k]);
        assert!((a - c).hypot(b - d) < 1e-6, "u{k}");
    }
}

#[test]
fn roots_listing() {
    let v = json(&["roots", "--bound", "2"]);
    let labels: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["label"].as_str().unwrap()).collect();
    assert!(labels.contains(&"alpha-delta1"));
    assert!(!labels.contains(&"alpha"));
}

#[test]
fn bad_configuration_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "sed = 1\n").unwrap();
    let out = nodal(&["--config", path.to_str().unwrap(), "roots"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(nodal(&["eval", "E4", "--tau", "0-1i"]).status.code(), Some(2));
    assert_eq!(nodal(&["eval", "E4", "--tau", "zz"]).status.code(), Some(2));
    assert_eq!(nodal(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(nodal(&["verify", "lattice", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(nodal(&["gamma", "--u-grid", "1,2"]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "seed = 5\nsamples = 3\nformat = \"json\"\n").unwrap();
    let cfg = path.to_str().unwrap();
    let from_file = json(&["--config", cfg, "verify", "identities"]);
    assert_eq!(from_file["seed"], 5);
    assert_eq!(from_file["samples"], 3);
    let flagged = json(&["--config", cfg, "verify", "identities", "--seed", "6"]);
    assert_eq!(flagged["seed"], 6);
    assert_eq!(flagged["samples"], 3);
}

#[test]
fn csv_output_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("roots.csv");
    let out = nodal(&["roots", "--bound", "1", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,delta1,delta2,label"));
    assert!(text.contains("1,-1,0,alpha-delta1"));

    let eval = nodal(&["eval", "E4", "--tau", "0+1i", "--format", "csv"]);
    let text = String::from_utf8(eval.stdout).unwrap();
    assert!(text.starts_with("function,value_re,value_im,error_estimate\n"));
}

#[test]
fn single_period_evaluation() {
    let v = json(&["gamma", "--path", "path3", "--u", "100"]);
    let (re, im) = complex(&v["value"]);
    // u^(1/2) times the period approaches 2 pi i
    assert!(re.abs() < 1e-9);
    assert!((im * 10.0 - 2.0 * std::f64::consts::PI).abs() < 0.1);
    let off_chamber = nodal(&["gamma", "--path", "path3", "--u", "100", "--t", "-1,1,0.2+1i"]);
    assert_eq!(off_chamber.status.code(), Some(2));
}

#[test]
fn frobenius_tensors_have_flat_metric() {
    let v = json(&["frobenius", "--t", "-1,1,0+1i"]);
    assert_eq!(complex(&v["eta"][0][2]), (1.0, 0.0));
    assert_eq!(complex(&v["eta"][1][1]), (2.0, 0.0));
    assert!(v["c"].as_array().unwrap().len() == 3);
}
