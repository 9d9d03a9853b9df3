use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sorites_core::scenario::replay;

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn sorites(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sorites"))
        .args(args)
        .output()
        .unwrap()
}

fn run_file(path: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["--scenario", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    sorites(&args)
}

fn shipped() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(scenarios_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn shipped_scenarios_are_deterministic_and_replay() {
    for path in shipped() {
        let a = run_file(&path, &[]);
        let b = run_file(&path, &[]);
        assert!(
            a.status.success(),
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{}", path.display());
        assert!(a.stdout.ends_with(b"\n"));
        let report: Value = serde_json::from_slice(&a.stdout).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        replay(&text, path.parent().unwrap(), &report)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn threshold_grid_fails_tolerance_at_the_cut() {
    let out = run_file(&scenarios_dir().join("threshold_grid.json"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["result"]["verdict"]["kind"], "tolerance_fails");
    assert_eq!(
        r["result"]["verdict"]["points"],
        serde_json::json!(["2", "3"])
    );
    assert_eq!(r["result"]["contradiction"]["violating_link"], 1);
}

#[test]
fn boundary_scenario_reports_the_trace() {
    let out = run_file(&scenarios_dir().join("boundary_third.json"), &[]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let res = &r["result"];
    assert_eq!(res["oracle_calls"], 20);
    assert_eq!(res["q"].as_array().unwrap().len(), 21);
    assert!(res["abs_error"].as_f64().unwrap() <= (-20f64).exp2());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"error_bound\": 9.5367431640625000e-7"));
}

#[test]
fn malformed_json_exits_two_without_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "bad.json", "{\"schema_version\": 1, \"kind\": ");
    let out = run_file(&p, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
    let quiet = run_file(&p, &["--quiet"]);
    assert_eq!(quiet.status.code(), Some(2));
    assert!(quiet.stderr.is_empty());
}

#[test]
fn schema_violations_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        (
            "unknown_kind.json",
            r#"{"schema_version":1,"kind":"poetry","payload":{}}"#,
        ),
        (
            "bad_field.json",
            r#"{"schema_version":1,"kind":"boundary","payload":{"n":3,"v":0.5,"colour":1}}"#,
        ),
        (
            "bad_space.json",
            r#"{"schema_version":1,"kind":"space-analysis","payload":{"points":["a"],"vicinities":{"a":[["b"]]},"pi":{"a":"r"}}}"#,
        ),
        (
            "no_seed.json",
            r#"{"schema_version":1,"kind":"rulemaking","payload":{"distribution":{"kind":"uniform","p_r1":0.5}}}"#,
        ),
        (
            "missing_table.json",
            r#"{"schema_version":1,"kind":"comparative","payload":{"points":["a"],"matcher":{"kind":"table","path":"nope.csv"}}}"#,
        ),
    ] {
        let out = run_file(&write_temp(&dir, name, body), &[]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(out.stdout.is_empty(), "{name}");
    }
    assert_eq!(
        sorites(&["--scenario", "/nonexistent.json"]).status.code(),
        Some(2)
    );
    assert_eq!(sorites(&["--format", "yaml"]).status.code(), Some(2));
}

#[test]
fn budget_overflow_exits_three() {
    let out = run_file(&scenarios_dir().join("branching.json"), &["--budget", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn seed_flag_overrides_the_file() {
    let path = scenarios_dir().join("rulemaking.json");
    let base = run_file(&path, &[]);
    let same = run_file(&path, &["--seed", "2024"]);
    let other = run_file(&path, &["--seed", "9"]);
    assert_eq!(base.stdout, same.stdout);
    assert_ne!(base.stdout, other.stdout);
    let r: Value = serde_json::from_slice(&other.stdout).unwrap();
    assert_eq!(r["seed"], 9);
    assert_eq!(r["input"]["seed"], 9);
}

#[test]
fn text_format_lists_leaves() {
    let out = run_file(&scenarios_dir().join("fuzzy.json"), &["--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("result.evaluations[0].value = "));
    assert!(text.contains("kind = \"fuzzy\""));
}

#[test]
fn tampered_witnesses_fail_replay() {
    let path = scenarios_dir().join("threshold_grid.json");
    let text = std::fs::read_to_string(&path).unwrap();
    let out = run_file(&path, &[]);
    let mut report: Value = serde_json::from_slice(&out.stdout).unwrap();
    report["result"]["contradiction"]["violating_link"] = 0.into();
    assert!(replay(&text, path.parent().unwrap(), &report).is_err());

    let path = scenarios_dir().join("branching.json");
    let text = std::fs::read_to_string(&path).unwrap();
    let out = run_file(&path, &[]);
    let mut report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = report["result"]["connectivity"].as_array_mut().unwrap();
    let disconnected = entries
        .iter_mut()
        .find(|e| e["verdict"] == "disconnected")
        .unwrap();
    // Swap a's vicinity in the separating cover for the other one.
    let a = &mut disconnected["witness_cover"]["a"];
    *a = if a[1] == "b" {
        serde_json::json!(["a", "c"])
    } else {
        serde_json::json!(["a", "b"])
    };
    assert!(replay(&text, path.parent().unwrap(), &report).is_err());
}
