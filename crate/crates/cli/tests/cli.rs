use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const I1: &str = "alpha = [\"0\", \"1\"]\ns = [\"1/2\", \"1/2\"]\n";

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lauricella"))
        .args(args)
        .env_remove("LAURICELLA_H_MAX")
        .env_remove("LAURICELLA_BETA")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn validate_i1() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i1.toml", I1);
    let out = run(&["validate", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["hypotheses"]["all_operative_pass"], true);
    assert_eq!(v["instance"]["b_coeffs"], serde_json::json!(["-1/2", "1"]));
}

#[test]
fn echo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i2.toml", "alpha = [\"0\", \"1\", \"-1\"]\ns = [\"1/3\", \"1/4\", \"1/5\"]\n");
    let first = json(&run(&["validate", f.to_str().unwrap()]));
    let quote = |k: &str| {
        let xs: Vec<String> = first["instance"][k].as_array().unwrap().iter().map(|x| format!("{x}")).collect();
        format!("{k} = [{}]\n", xs.join(", "))
    };
    let g = write(dir.path(), "roots.toml", &(quote("alpha") + &quote("s")));
    let second = json(&run(&["validate", g.to_str().unwrap()]));
    assert_eq!(first, second);
    let h = write(dir.path(), "polys.toml", &(quote("a_coeffs") + &quote("b_coeffs")));
    let third = json(&run(&["validate", h.to_str().unwrap()]));
    assert_eq!(first["hypotheses"], third["hypotheses"]);
    assert_eq!(first["instance"]["a_coeffs"], third["instance"]["a_coeffs"]);
    assert_eq!(first["instance"]["b_coeffs"], third["instance"]["b_coeffs"]);
}

#[test]
fn repeated_root_names_first() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "rep.toml", "alpha = [\"1/2\", \"1/2\"]\ns = [\"1/3\", \"1/3\"]\n");
    let out = run(&["validate", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let first = v["hypotheses"]["checks"].as_array().unwrap().iter().find(|c| c["name"] == "first").unwrap();
    assert_eq!(first["passed"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("first"));
}

#[test]
fn zero_denominator_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.toml", "alpha = [\"0\", \"1\"]\ns = [\"1/2\", \"1/0\"]\n");
    let out = run(&["validate", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("1/0") && err.contains("line 2") && err.contains("s[1]"), "{err}");
}

#[test]
fn mixed_styles_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "mixed.toml", &format!("{I1}a_coeffs = [0, -1, 1]\nb_coeffs = [\"-1/2\", 1]\n"));
    assert_eq!(run(&["validate", f.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn build_i1_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i1.toml", I1);
    let out = run(&["build", f.to_str().unwrap(), "--n-max", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let certs = v["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 11);
    assert!(certs.iter().all(|c| c["delta_nonzero"] == true && c["delta_is_constant"] == true));
    assert_eq!(certs[0]["delta_n"], "1");
}

#[test]
fn build_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i2.toml", "alpha = [\"0\", \"1\", \"-1\"]\ns = [\"1/3\", \"1/4\", \"1/5\"]\nn_max = 3\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = run(&["build", f.to_str().unwrap(), "--out-dir", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 5);
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn measure_i1_is_finite() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i1.toml", &format!("{I1}beta = \"100000\"\nplace = \"inf\"\n"));
    let out = run(&["measure", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["applicable"], true);
    let lo: f64 = v["mu_measure"]["lower"].as_str().unwrap().parse().unwrap();
    let hi: f64 = v["mu_measure"]["upper"].as_str().unwrap().parse().unwrap();
    assert!(lo.is_finite() && hi.is_finite() && lo <= hi && lo > 1.0);
}

#[test]
fn measure_below_threshold_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i1.toml", &format!("{I1}beta = \"1000\"\n"));
    let out = run(&["measure", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["v_positive"], false);
}

#[test]
fn scan_with_zero_height_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i1.toml", &format!("{I1}beta = \"100000\"\nH_max = 0\n"));
    let out = run(&["scan", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("lambda,lambda_0,form_lo"));
}

#[test]
fn flags_and_env_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i1.toml", &format!("{I1}beta = \"100000\"\nH_max = 0\n"));
    let out = run(&["scan", f.to_str().unwrap(), "--h-max", "2"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 24);
    let out = Command::new(env!("CARGO_BIN_EXE_lauricella"))
        .args(["scan", f.to_str().unwrap()])
        .env("LAURICELLA_H_MAX", "1")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 8);
}

#[test]
fn eval_padic() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i1.toml", &format!("{I1}beta = \"1/125\"\nplace = 5\nprecision = 64\n"));
    let out = run(&["eval", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["values"][0]["value"]["valuation"], 3);
}

#[test]
fn eval_requires_beta() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i1.toml", I1);
    let out = run(&["eval", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beta"));
}
