//! End-to-end runs of the `parahoric` binary, checked against the schemas in `schemas/`.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).display().to_string()
}

fn run_with(args: &[&str], precision: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_parahoric"));
    cmd.args(args).env_remove("PARAHORIC_PRECISION");
    if let Some(n) = precision {
        cmd.env("PARAHORIC_PRECISION", n);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Value {
    let out = run_with(args, None);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn schema_file(id: &str) -> PathBuf {
    let stem = id.strip_prefix("parahoric.").expect("parahoric schema id");
    root().join("schemas").join(format!("{stem}.json"))
}

fn check_schema(doc: &Value, id: &str) {
    let path = schema_file(id);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{} rejects output: {errors:?}", path.display());
}

fn checked(args: &[&str]) -> Value {
    let doc = run(args);
    let id = doc["schema"].as_str().expect("schema field").to_string();
    check_schema(&doc, &id);
    doc
}

fn ints(v: &Value) -> Vec<i64> {
    v.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect()
}

#[test]
fn every_schema_file_compiles() {
    for entry in std::fs::read_dir(root().join("schemas")).unwrap() {
        let path = entry.unwrap().path();
        let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(jsonschema::meta::is_valid(&schema), "{}", path.display());
        jsonschema::validator_for(&schema).unwrap();
    }
}

#[test]
fn fixtures_match_their_schemas() {
    for entry in std::fs::read_dir(root().join("fixtures")).unwrap() {
        let path = entry.unwrap().path();
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let id = doc["schema"].as_str().unwrap_or("parahoric.weight.v1").to_string();
        check_schema(&doc, &id);
    }
}

#[test]
fn crit_of_the_gl4_example() {
    let doc = checked(&["crit", "--weight", &fixture("weight_2_1_-1_-2.json")]);
    assert_eq!(ints(&doc["crit_lambda"]), vec![-1, 0, 1]);
    assert_eq!(ints(&doc["crit_contragredient"]), vec![-1, 0, 1]);
    assert_eq!(doc["purity_weight"], 0);
}

#[test]
fn slope_check_accepts_small_slope() {
    let w = fixture("weight_2_0.json");
    let doc = checked(&["slope-check", "--weight", &w, "--alpha", "3"]);
    assert_eq!(doc["verdicts"][0]["non_critical"], true);
    let doc = checked(&["slope-check", "--weight", &w, "--alpha", "1*3^5"]);
    assert_eq!(doc["verdicts"][0]["non_critical"], false);
}

#[test]
fn branch_inside_and_outside_crit() {
    let w = fixture("weight_2_0.json");
    let inside = checked(&["branch", "--weight", &w, "--j", "-1"]);
    assert_eq!(inside["hom_dimension"], 1);
    assert_eq!(inside["nu_check"]["equivariant"], true);
    let outside = checked(&["branch", "--weight", &w, "--j", "1"]);
    assert_eq!(outside["hom_dimension"], 0);
    assert!(outside["nu"].is_null());
}

#[test]
fn up_slopes_reports_a_table() {
    let doc = checked(&["up-slopes", "--weight", &fixture("weight_2_0.json"), "--M", "4"]);
    assert!(!doc["slopes"].as_array().unwrap().is_empty());
    assert!(!doc["table"].as_array().unwrap().is_empty());
}

#[test]
fn lift_and_lp_at_level_eleven() {
    let lift = checked(&["lift", "--level", "11", "--p", "3", "--M", "6"]);
    assert!(lift["eigen_digits"].as_u64().unwrap() >= 6);
    let lp = checked(&["lp", "--level", "11", "--p", "3", "--M", "6"]);
    assert_eq!(lp["admissibility"]["h"], "0");
    assert_eq!(lp["admissibility"]["admissible"], true);
}

#[test]
fn reconstruct_zero_data_is_zero() {
    let doc = checked(&["reconstruct", "--data", &fixture("interpolation_zero.json"), "--h", "0"]);
    for comp in doc["distribution"]["components"].as_array().unwrap() {
        for m in comp["moments"].as_array().unwrap() {
            assert!(m.as_str().unwrap().starts_with("0 + O("), "{m}");
        }
    }
}

#[test]
fn reconstruct_dirac_data_is_nonzero() {
    let doc = checked(&["reconstruct", "--data", &fixture("interpolation_dirac.json"), "--h", "0"]);
    let any_nonzero = doc["distribution"]["components"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|c| c["moments"].as_array().unwrap())
        .any(|m| !m.as_str().unwrap().starts_with("0 + O("));
    assert!(any_nonzero);
}

#[test]
fn family_chart_is_free_at_level_eleven() {
    let doc = checked(&["family-chart", "--level", "11", "--p", "3", "--D", "2", "--M", "8"]);
    assert_eq!(doc["free_rank_one"], true);
    assert_eq!(doc["multiplicity"], 1);
}

#[test]
fn runs_are_byte_identical() {
    let args = ["lp", "--level", "11", "--p", "3", "--M", "5"];
    let a = run_with(&args, None);
    let b = run_with(&args, None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn precision_comes_from_the_environment() {
    let w = fixture("weight_2_0.json");
    let args = ["branch", "--weight", w.as_str(), "--j", "-1"];
    let out = run_with(&args, Some("12"));
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let nu = doc["nu"][0].as_str().unwrap();
    assert!(nu.ends_with("O(3^12)"), "{nu}");
}

#[test]
fn output_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("parahoric-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("crit.json");
    let out = run_with(
        &["crit", "--weight", &fixture("weight_2_0.json"), "-o", path.to_str().unwrap()],
        None,
    );
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    check_schema(&doc, "parahoric.cli.crit.v1");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn malformed_fixture_names_the_path() {
    let dir = std::env::temp_dir().join(format!("parahoric-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"p": 3, "d": 1}"#).unwrap();
    let out = run_with(&["crit", "--weight", bad.to_str().unwrap()], None);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("schema error"), "{err}");
    assert!(err.contains(bad.to_str().unwrap()), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn missing_fixture_is_an_error() {
    let out = run_with(&["crit", "--weight", "/nonexistent/weight.json"], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/weight.json"));
}
