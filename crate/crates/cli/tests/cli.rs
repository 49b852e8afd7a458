use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/configs").join(name)
}

fn difs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_difs")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, cmd: &str, cfg: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    difs(&args)
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is one JSON object")
}

#[test]
fn validate_reports_cantor() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "validate", &config("cantor.json"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("validate.json")).unwrap()).unwrap();
    assert_eq!(v["N"], 2);
    assert_eq!(v["ell"], 2);
    assert_eq!(v["r_over_s"], "73/81");
    assert_eq!(v["sigma_minus_nu"], "8/9");
}

#[test]
fn degenerate_pair_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "validate", &config("degenerate.json"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "construction");
}

#[test]
fn missing_field_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(config("cantor.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v.as_object_mut().unwrap().remove("m");
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, v.to_string()).unwrap();
    let out = run_in(dir.path(), "validate", &cfg, &[]);
    assert_eq!(out.status.code(), Some(1));
    let e = stderr_json(&out);
    assert_eq!(e["error"], "config");
    assert_eq!(e["path"], ".m");
}

#[test]
fn construct_has_one_row_per_coordinate_and_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "construct", &config("cantor.json"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("construct.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,k,fk,gjk,eta,len_t,p,q,P,S,word_digest"));
    // m = 3, kmax = 3, plus the k = 0 rows.
    assert_eq!(lines.count(), 3 * 4);
}

#[test]
fn construct_to_stdout_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), "construct", &config("cantor.json"), &[]);
    let out = difs(&["construct", "--config", config("cantor.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, fs::read(dir.path().join("construct.csv")).unwrap());
}

#[test]
fn verify_passes_and_reruns_against_golden() {
    let dir = tempfile::tempdir().unwrap();
    for _ in 0..2 {
        let out = run_in(dir.path(), "verify", &config("cantor.json"), &[]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(v["all_passed"], true);
    let goldens: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with("golden-"))
        .collect();
    assert_eq!(goldens.len(), 1);
}

#[test]
fn tampered_golden_fails_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("lacunary.json");
    assert_eq!(run_in(dir.path(), "liouville", &cfg, &[]).status.code(), Some(0));
    let golden = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.file_name().unwrap().to_string_lossy().starts_with("golden-"))
        .unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&golden).unwrap()).unwrap();
    v["liouville.exponent_lo.k1"] = "1/2".into();
    fs::write(&golden, v.to_string()).unwrap();
    let out = run_in(dir.path(), "liouville", &cfg, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "check");
}

#[test]
fn scan_certifies_lower_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "scan", &config("cantor.json"), &["--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("scan.json")).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["structural_failure"], serde_json::Value::Null);
}

#[test]
fn scan_beyond_cap_is_a_budget_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "scan", &config("cantor.json"), &["--k", "2"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn theta_grid_writes_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "theta", &config("cantor.json"), &["--grid", "10^1..10^4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let series = fs::read_to_string(dir.path().join("theta_series.csv")).unwrap();
    assert_eq!(series.lines().count(), 5);
}

#[test]
fn bad_grid_and_qmax_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("cantor.json");
    assert_eq!(run_in(dir.path(), "theta", &cfg, &["--grid", "ten"]).status.code(), Some(1));
    assert_eq!(run_in(dir.path(), "theta", &cfg, &["--Qmax", "-5"]).status.code(), Some(1));
    assert_eq!(run_in(dir.path(), "theta", &cfg, &["--Qmax", "1e5"]).status.code(), Some(1));
}

#[test]
fn demo_diagonal_rejects_m_1() {
    let out = difs(&["demo-diagonal", "--m", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn demo_diagonal_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = difs(&["demo-diagonal", "--m", "2", "--grid", "10,100", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("diagonal.json")).unwrap()).unwrap();
    assert_eq!(v["all_ok"], true);
    assert_eq!(v["points"], 2);
}

#[test]
fn missing_config_and_unknown_command() {
    assert_eq!(difs(&["construct"]).status.code(), Some(1));
    assert_eq!(difs(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(difs(&["--help"]).status.code(), Some(0));
}
