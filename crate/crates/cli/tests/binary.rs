use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qadic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qadic")).args(args).env_remove("QADIC_DEFAULT_PRECISION").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn default_cases() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("cases/default.json")
}

#[test]
fn eq_reports_through_exit_status() {
    assert_eq!(qadic(&["eq", "s u", "u^2 s"]).status.code(), Some(0));
    assert_eq!(qadic(&["eq", "s s* + u s s* u*", "1"]).status.code(), Some(0));
    assert_eq!(qadic(&["eq", "s u", "u s"]).status.code(), Some(1));
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(qadic(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qadic(&["normalize", "u +"]).status.code(), Some(2));
    assert_eq!(qadic(&["matrix", "u", "-N", "12"]).status.code(), Some(2));
    let out = qadic(&["normalize", "s^-1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "parse");
    assert_eq!(err["error"]["offset"], 2);
}

#[test]
fn normalize_prints_canonical_form() {
    let out = qadic(&["normalize", "s s* + u s s* u^-1"]);
    assert_eq!(stdout(&out), "1\n");
    let out = qadic(&["normalize", "u^2 s"]);
    assert_eq!(stdout(&out), "s u\n");
}

#[test]
fn wold_builds_the_bilateral_shift() {
    let out = qadic(&["wold", "--s0", "s", "--s1", "u s", "-N", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("U e_-4 = e_-3"));
    assert!(text.contains("U e_4 = e_5"));
    assert_eq!(text.matches(": pass").count(), 3);
}

#[test]
fn wold_rejects_non_cuntz_pairs() {
    assert_eq!(qadic(&["wold", "--s0", "s", "--s1", "s"]).status.code(), Some(3));
}

#[test]
fn matrix_writes_sparse_csv() {
    let out = qadic(&["matrix", "s s*", "-N", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "row,col,re,im\n-2,-2,1.0,0.0\n0,0,1.0,0.0\n2,2,1.0,0.0\n");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let out = qadic(&["matrix", "u", "-N", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty(), "boundary loss warns on stderr");
    let csv = std::fs::read_to_string(path).unwrap();
    assert!(csv.starts_with("row,col,re,im\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn duality_on_default_cases() {
    let cases = default_cases();
    let out = qadic(&["duality", "--cases", cases.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["timestamp"].as_u64().unwrap() > 0);
    let results = report["results"].as_array().unwrap();
    assert_eq!(results.len(), 5);
    for r in results {
        for key in ["case", "residual", "intertwining", "tolerances", "grid", "pass"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
        assert_eq!(r["pass"], true);
        assert!(r["residual"].as_f64().unwrap() <= r["tolerances"]["theorem"].as_f64().unwrap());
        assert_eq!(r["grid"]["g"], 6);
    }
    assert_eq!(results[3]["case"]["c"], "2^-1");
}

#[test]
fn duality_fails_under_tight_tolerance() {
    let cases = default_cases();
    let out = qadic(&["duality", "--cases", cases.to_str().unwrap(), "--tol", "1e-12", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("false"));
}

#[test]
fn duality_reports_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "[{\"d\": \"1/3\"}]").unwrap();
    let code = qadic(&["duality", "--cases", path.to_str().unwrap()]).status.code();
    assert!(matches!(code, Some(2) | Some(3)), "{code:?}");
}

#[test]
fn precision_comes_from_environment() {
    let run = |value: &str| {
        Command::new(env!("CARGO_BIN_EXE_qadic"))
            .args(["normalize", "u"])
            .env("QADIC_DEFAULT_PRECISION", value)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run("32"), Some(0));
    assert_eq!(run("0"), Some(2));
    assert_eq!(run("many"), Some(2));
}
