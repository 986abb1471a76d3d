use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mixsum(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mixsum"));
    cmd.args(args).env_remove("MIXSUM_OUTPUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("MIXSUM_OUTPUT_DIR", d);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_identities() {
    let out = mixsum(&["verify", "--theta", "quad:-1,2,1", "--r", "101", "--x", "60"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["passed"], true);
    assert!(doc["results"]["second_rel_error"].as_f64().unwrap() < 1e-10);
    assert!(doc["results"]["poisson_max_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn moments_csv_rational() {
    let out = mixsum(&["moments", "--theta", "rat:1/3", "--r-grid", "101,1009", "--x-rule", "frac:0.5", "--format", "csv"], None);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header = rdr.headers().unwrap().clone();
    assert_eq!(&header[0], "schema_version");
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        let err: f64 = r[col("second_rel_error")].parse().unwrap();
        assert!(err < 1e-10);
        let rms: f64 = r[col("first_over_rms")].parse().unwrap();
        assert!(rms > 0.0 && rms <= 1.0 + 1e-12);
    }
}

#[test]
fn dyadic_exponents_rejected() {
    let out = mixsum(&["poisson", "--delta", "2", "--A", "1"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3δ+4 < 4A"));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_prime_rejected() {
    let out = mixsum(&["dist", "--r", "1001"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not an odd prime"));
}

#[test]
fn negative_bounds_parse() {
    let out = mixsum(&["count", "n4", "--r", "101", "--lo", "-4", "--hi", "4"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["config"]["args"]["n4"]["lo"], -4);
}

#[test]
fn output_is_reproducible() {
    let a = mixsum(&["shortsum", "--x", "16,64,300", "--threads", "1"], None);
    let b = mixsum(&["shortsum", "--x", "16,64,300", "--threads", "3"], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_dir_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = mixsum(&["count", "injection", "--bound", "3", "--format", "csv"], Some(dir.path()));
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("count.csv")).unwrap();
    assert!(text.starts_with("schema_version,"));

    let explicit = dir.path().join("nested/inj.json");
    let out = mixsum(&["count", "injection", "--bound", "3", "-o", explicit.to_str().unwrap()], Some(dir.path()));
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&explicit).unwrap()).unwrap();
    assert_eq!(doc["command"], "count");
}
