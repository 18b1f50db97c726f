use std::path::Path;
use std::process::{Command, Output};

use etaforge::cli::{self, ExperimentConfig};
use serde_json::Value;

fn etaforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etaforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn clifford_suite_passes_with_one_report() {
    let o = etaforge(&["--suite", "clifford"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let runs = v.as_array().unwrap();
    assert_eq!(runs.len(), 1);
    assert_eq!(runs[0]["experiment"], "clifford-check");
    assert_eq!(runs[0]["pass"], true);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("PASS clifford-check"));
}

#[test]
fn unknown_tag_selects_nothing() {
    let o = etaforge(&["--suite", "no-such-tag"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o), Value::Array(vec![]));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("unknown-key.json", r#"{"experiment": "sphere-omega", "k": 2, "kk": 1}"#),
        ("unknown-id.json", r#"{"experiment": "nope"}"#),
        ("bad-budget.json", r#"{"experiment": "winding", "budget": {"radii": 100000}}"#),
        ("not-json.json", "{"),
    ] {
        let path = write_config(dir.path(), name, text);
        let o = etaforge(&["--config", &path]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("config error"), "{name}");
    }
    assert_eq!(etaforge(&["--suite", "clifford", "--emit-csv"]).status.code(), Some(2));
    assert_eq!(etaforge(&[]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "c.json",
        r#"{"experiment": "regint-demo", "function": "lorentzian", "p": 1, "reference": 0.0}"#,
    );
    let o = etaforge(&["--config", &path]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert_eq!(v["pass"], false);
    assert!((v["value"]["re"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn numeric_failure_exits_with_three_and_carries_payload() {
    let dir = tempfile::tempdir().unwrap();
    let degrees: Vec<String> = (1..=20).map(|d| format!("{{\"deg\": {}, \"logpow\": 0}}", -2 * d)).collect();
    let text = format!(
        r#"{{"experiment": "regint-demo", "function": "lorentzian", "p": 1, "reference": 3.14,
            "model": {{"terms": [{}], "remainder": -42}}}}"#,
        degrees.join(",")
    );
    let path = write_config(dir.path(), "c.json", &text);
    let o = etaforge(&["--config", &path]);
    assert_eq!(o.status.code(), Some(3));
    let v = stdout_json(&o);
    assert_eq!(v["diagnostic"]["kind"], "ladder-too-short");
    // the primitive basis adds the constant term
    assert_eq!(v["diagnostic"]["detail"]["terms"], 21);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "c.json", r#"{"experiment": "trace-tanh", "mu": [0.7, 3.0]}"#);
    let strip = |o: &Output| {
        let mut v = stdout_json(o);
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    let a = etaforge(&["--config", &path]);
    let b = etaforge(&["--config", &path]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn config_hash_ignores_defaults_and_output() {
    let a = ExperimentConfig::from_json(r#"{"experiment": "tr-derivative-check"}"#).unwrap();
    let b = ExperimentConfig::from_json(
        r#"{"experiment": "tr-derivative-check", "a": 0.25, "budget": "standard", "output": "x.json"}"#,
    )
    .unwrap();
    let c = ExperimentConfig::from_json(r#"{"experiment": "tr-derivative-check", "a": 0.3}"#).unwrap();
    let d = ExperimentConfig::from_json(r#"{"experiment": "tr-derivative-check", "budget": "quick"}"#).unwrap();
    assert_eq!(a.hash(), b.hash());
    assert_ne!(a.hash(), c.hash());
    assert_ne!(a.hash(), d.hash());
    let report = cli::run(&a).unwrap();
    assert_eq!(report.config_hash, a.hash());
    assert_eq!(report.inputs["a"], 0.25);
}

#[test]
fn out_directory_holds_reports_index_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = etaforge(&["--suite", "regint-demo,mellin-zero", "--out", out.to_str().unwrap(), "--emit-csv"]);
    assert_eq!(o.status.code(), Some(0));
    let index: Value = serde_json::from_str(&std::fs::read_to_string(out.join("suite.json")).unwrap()).unwrap();
    assert_eq!(index["passed"], 2);
    for id in ["regint-demo", "mellin-zero"] {
        let r: Value = serde_json::from_str(&std::fs::read_to_string(out.join(format!("{id}.json"))).unwrap()).unwrap();
        assert_eq!(r["experiment"], id);
    }
    let csvs: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
        .collect();
    assert!(!csvs.is_empty());
    let text = std::fs::read_to_string(csvs[0].path()).unwrap();
    assert!(text.starts_with("radius,direction-index,re,im"));
}

#[test]
fn config_output_field_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let text = format!(r#"{{"experiment": "clifford-check", "k": 3, "output": {:?}}}"#, target.to_str().unwrap());
    let path = write_config(dir.path(), "c.json", &text);
    let o = etaforge(&["--config", &path]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(r["checks"].as_array().unwrap().len(), 4);
    assert!(r["inputs"].get("output").is_none());
}

#[test]
fn seeded_property_runs_repeat() {
    let a = etaforge(&["--suite", "prop-leibniz", "--seed", "11"]);
    let b = etaforge(&["--suite", "prop-leibniz", "--seed", "11"]);
    let c = etaforge(&["--suite", "prop-leibniz", "--seed", "12"]);
    let checks = |o: &Output| stdout_json(o)[0]["checks"].clone();
    assert_eq!(checks(&a), checks(&b));
    assert_ne!(checks(&a), checks(&c));
    assert_eq!(stdout_json(&a)[0]["inputs"]["seed"], 11);
}
