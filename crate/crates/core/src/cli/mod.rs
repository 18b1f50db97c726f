//! Experiment driver behind the `etaforge` binary.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

pub use config::{Budget, ConfigError, ExperimentConfig, Preset};
pub use experiments::{info, ExperimentInfo, ExperimentParams, REGISTRY};
pub use report::{Check, Failure, Provenance, Report};

/// Exit codes of the binary.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub type RunResult = Result<Report, Failure>;

/// Runs one experiment. Numerical errors become a [`Failure`] carrying the error payload.
pub fn run(cfg: &ExperimentConfig) -> RunResult {
    let start = Instant::now();
    let result = cfg.params.execute(&cfg.budget);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let inputs = cfg.canonical();
    let hash = cfg.hash();
    match result {
        Ok(out) => Ok(Report::assemble(cfg.id(), inputs, hash, out, wall_ms)),
        Err(e) => Err(Failure {
            experiment: cfg.id().into(),
            inputs,
            config_hash: hash,
            error: e.to_string(),
            diagnostic: serde_json::to_value(&e).unwrap_or(Value::Null),
        }),
    }
}

/// Registered experiments matching a comma-separated filter of tags and ids.
/// `all` and `acceptance` select the acceptance suite; unknown names match nothing.
pub fn select(filter: &str) -> Vec<&'static ExperimentInfo> {
    let words: Vec<&str> = filter.split(',').map(str::trim).filter(|w| !w.is_empty()).collect();
    REGISTRY
        .iter()
        .filter(|e| {
            words.iter().any(|w| match *w {
                "all" | "acceptance" => e.acceptance,
                w => e.id == w || e.tags.contains(&w),
            })
        })
        .collect()
}

/// Configurations for a suite run with default parameters.
pub fn suite_configs(filter: &str, budget: Budget, seed: Option<u64>) -> Vec<ExperimentConfig> {
    select(filter)
        .into_iter()
        .map(|e| {
            let mut params = ExperimentParams::default_for(e.id).expect("registered experiments have defaults");
            if let Some(s) = seed {
                params.set_seed(s);
            }
            ExperimentConfig {
                params,
                budget,
                output: None,
            }
        })
        .collect()
}

/// Runs configurations in registry order, optionally in parallel.
pub fn run_all(configs: &[ExperimentConfig], parallel: bool) -> Vec<RunResult> {
    if parallel {
        configs.par_iter().map(run).collect()
    } else {
        configs.iter().map(run).collect()
    }
}

/// `3` if any run errored, else `1` if any check failed, else `0`.
pub fn exit_code(results: &[RunResult]) -> i32 {
    if results.iter().any(Result::is_err) {
        EXIT_NUMERIC
    } else if results.iter().any(|r| r.as_ref().is_ok_and(|r| !r.pass)) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    }
}

pub fn summary_line(r: &RunResult) -> String {
    match r {
        Ok(rep) => rep.summary_line(),
        Err(f) => f.summary_line(),
    }
}

#[derive(Debug, Serialize)]
struct SuiteEntry<'a> {
    experiment: &'a str,
    status: &'static str,
    config_hash: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

/// Compact index of a suite run.
pub fn suite_summary(filter: &str, results: &[RunResult]) -> Value {
    let entries: Vec<SuiteEntry> = results
        .iter()
        .map(|r| match r {
            Ok(rep) => SuiteEntry {
                experiment: &rep.experiment,
                status: if rep.pass { "pass" } else { "fail" },
                config_hash: &rep.config_hash,
                wall_ms: Some(rep.timing.wall_ms),
            },
            Err(f) => SuiteEntry {
                experiment: &f.experiment,
                status: "error",
                config_hash: &f.config_hash,
                wall_ms: None,
            },
        })
        .collect();
    let count = |s: &str| entries.iter().filter(|e| e.status == s).count();
    serde_json::json!({
        "filter": filter,
        "passed": count("pass"),
        "failed": count("fail"),
        "errors": count("error"),
        "exit_code": exit_code(results),
        "experiments": entries,
    })
}

pub fn result_json(r: &RunResult) -> Value {
    match r {
        Ok(rep) => serde_json::to_value(rep),
        Err(f) => serde_json::to_value(f),
    }
    .expect("reports serialize")
}

/// Writes `<id>.json` per run and, with `csv`, `<id>__<table>.csv` per tabulated sample set.
pub fn write_results(dir: &Path, results: &[RunResult], csv: bool) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for r in results {
        let id = match r {
            Ok(rep) => &rep.experiment,
            Err(f) => &f.experiment,
        };
        let text = serde_json::to_string_pretty(&result_json(r)).expect("reports serialize");
        std::fs::write(dir.join(format!("{id}.json")), text + "\n")?;
        if let (true, Ok(rep)) = (csv, r) {
            for t in &rep.tables {
                t.write_csv(&dir.join(format!("{id}__{}.csv", t.name)))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_by_tag_and_id() {
        assert_eq!(select("all").len(), 16);
        assert_eq!(select("acceptance").len(), 16);
        assert_eq!(select("clifford").len(), 1);
        assert_eq!(select("properties").len(), 7);
        assert!(select("no-such-tag").is_empty());
        let ids: Vec<_> = select("winding, trace-tanh").iter().map(|e| e.id).collect();
        assert_eq!(ids, ["winding", "trace-tanh"]);
    }

    #[test]
    fn numeric_failure_outranks_check_failure() {
        let cfg = ExperimentConfig::new(ExperimentParams::default_for("clifford-check").unwrap());
        let ok = run(&cfg);
        assert!(ok.as_ref().unwrap().pass);
        let fail = Err(Failure {
            experiment: "x".into(),
            inputs: Value::Null,
            config_hash: String::new(),
            error: "e".into(),
            diagnostic: Value::Null,
        });
        assert_eq!(exit_code(std::slice::from_ref(&ok)), EXIT_PASS);
        assert_eq!(exit_code(&[ok, fail]), EXIT_NUMERIC);
    }
}
