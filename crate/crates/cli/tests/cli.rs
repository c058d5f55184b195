//! Exit codes and output files of the `cran` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cran_core::optimize::{self, Objective};
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn cran(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cran")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn scalar_unit_has_two_jd_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = cran(&["eval-region", "--instance", data("scalar_unit.json").to_str().unwrap(), "--quantizer", "appendixD", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("constraints.csv"));
    let jd: Vec<_> = rows.iter().filter(|r| r[0] == "jd").collect();
    assert_eq!(jd.len(), 2);
    let rhs = |s: &str| jd.iter().find(|r| r[2] == s).unwrap()[3].parse::<f64>().unwrap();
    assert!((rhs("0") - 1.5f64.log2()).abs() < 1e-12);
    assert!((rhs("1") - 1.0).abs() < 1e-12);
    let header = csv::Reader::from_path(dir.path().join("constraints.csv")).unwrap().headers().unwrap().clone();
    assert_eq!(header.iter().collect::<Vec<_>>(), ["kind", "T-bitmask", "S-bitmask", "rhs-bits"]);
}

#[test]
fn two_user_boundary_is_monotone_in_r1() {
    let dir = tempfile::tempdir().unwrap();
    let o = cran(&["eval-region", "--instance", data("two_user.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&dir.path().join("boundary.csv"));
    for region in ["jd", "cutset"] {
        let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r[0] == region).map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap())).collect();
        assert!(pts.len() >= 3, "{region}");
        for w in pts.windows(2) {
            assert!(w[1].0 >= w[0].0 - 1e-12 && w[1].1 <= w[0].1 + 1e-12, "{region}: {w:?}");
        }
    }
    // The JD region sits inside the cut-set region.
    let summary = json(&dir.path().join("summary.json"));
    let sums = &summary["sum_rate_bits"];
    assert!(sums["jd"].as_f64().unwrap() <= sums["cutset"].as_f64().unwrap() + 1e-9);
}

#[test]
fn missing_file_is_an_input_error() {
    let o = cran(&["eval-region", "--instance", "/nonexistent/instance.json"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/instance.json"));
}

#[test]
fn shape_errors_name_the_index() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = json(&data("two_user.json"));
    v["Sigma"][1][0].as_array_mut().unwrap().pop();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let o = cran(&["eval-region", "--instance", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Sigma[1][0]: expected 2 columns, found 1"));
}

#[test]
fn cap_exceeded_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = cran(&["eval-region", "--random", "7,1,1,1,0,1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let o = cran(&["verify", "--users", "1,7", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn sd_sum_on_scalar_unit_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let o = cran(&["optimize", "--instance", data("scalar_unit.json").to_str().unwrap(), "--objective", "sd-sum", "--trace", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json(&dir.path().join("solve.json"))["value_bits"].as_f64().unwrap();
    let inst = cran_core::NetworkInstance::scalar(1.0, 1.0, 1.0, 2.0);
    let oracle = optimize::grid_oracle(&inst, &Objective::SdSum, 201).unwrap();
    assert!((v - oracle.value).abs() <= 1e-4, "{v} vs {}", oracle.value);
    assert!(csv_rows(&dir.path().join("trace.csv")).len() > 1);
}

#[test]
fn zero_weights_give_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = cran(&["optimize", "--instance", data("two_user.json").to_str().unwrap(), "--weights", "0,0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&dir.path().join("solve.json"))["value_bits"].as_f64().unwrap(), 0.0);
}

#[test]
fn iteration_budget_exhaustion_exits_four_with_iterate() {
    let dir = tempfile::tempdir().unwrap();
    let o = cran(&["optimize", "--instance", data("scalar_unit.json").to_str().unwrap(), "--objective", "sd-sum", "--max-iters", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    let s = json(&dir.path().join("solve.json"));
    assert_eq!(s["converged"], Value::Bool(false));
    assert!(s["value_bits"].as_f64().unwrap().is_finite());
}

#[test]
fn invalid_weights_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let inst = data("two_user.json");
    assert_eq!(code(&cran(&["optimize", "--instance", inst.to_str().unwrap(), "--weights", "1,-2", "--out", out])), 2);
    assert_eq!(code(&cran(&["optimize", "--instance", inst.to_str().unwrap(), "--weights", "1", "--out", out])), 2);
    assert_eq!(code(&cran(&["optimize", "--instance", inst.to_str().unwrap(), "--weights", "a,b", "--out", out])), 2);
}

#[test]
fn planted_submodularity_fault_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let o = cran(&["verify", "--count", "6", "--theorems", "lemmas", "--inject-fault", "submodular", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let r = json(&dir.path().join("report.json"));
    assert!(r["lemmas"]["violations"].as_u64().unwrap() > 0);
    assert!(r["violations"][0].as_str().unwrap().contains("not submodular"));
    assert_eq!(r["pass"], Value::Bool(false));
}

#[test]
fn zero_instances_give_an_empty_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = cran(&["verify", "--count", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = json(&dir.path().join("report.json"));
    assert_eq!(r["instances"], 0);
    assert_eq!(r["theorem1"]["runs"], 0);
    assert_eq!(r["violations"].as_array().unwrap().len(), 0);
    assert!(json(&dir.path().join("metadata.json"))["elapsed_s"].is_number());
}

#[test]
fn gap_check_on_a_high_snr_instance() {
    let dir = tempfile::tempdir().unwrap();
    let o = cran(&["gap-check", "--random", "2,2,2,2,40,9", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("gap.json"));
    assert_eq!(r["pass"], Value::Bool(true));
    // NL + M = 6 bounds every per-user gap.
    assert!(r["worst_gap_bits"]["jd"].as_f64().unwrap() <= 6.0 + 1e-9);
    let rows = csv_rows(&dir.path().join("gaps.csv"));
    assert_eq!(rows.iter().filter(|r| r[1] == "jd").count(), 3 * 4);
}

#[test]
fn quantizer_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let qpath = dir.path().join("q.json");
    std::fs::write(&qpath, r#"{"Q": [[[[1.0, 0.0]]]]}"#).unwrap();
    let spec = format!("file:{}", qpath.display());
    let o = cran(&["eval-region", "--instance", data("scalar_unit.json").to_str().unwrap(), "--quantizer", &spec, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let s = json(&dir.path().join("summary.json"));
    assert!((s["penalty_bits"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let o = cran(&["eval-region", "--instance", data("scalar_unit.json").to_str().unwrap(), "--quantizer", "bogus"]);
    assert_eq!(code(&o), 2);
}
