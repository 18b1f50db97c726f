use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use etaforge::cli::{self, Budget, ConfigError, ExperimentConfig, Preset, RunResult, EXIT_CONFIG};

/// Runs etaforge experiments and writes JSON reports.
#[derive(Debug, Parser)]
#[command(name = "etaforge", version)]
struct Args {
    /// JSON experiment config.
    #[arg(long, conflicts_with_all = ["suite", "list"])]
    config: Option<PathBuf>,
    /// Comma-separated tags or ids (`all` for the acceptance suite, `properties` for property checks).
    #[arg(long)]
    suite: Option<String>,
    /// Directory for per-experiment reports and the suite index.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Resolution preset; overrides the preset of a config file.
    #[arg(long, value_enum)]
    budget: Option<Preset>,
    /// Seed of randomized corpora.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write tabulated fit samples as CSV (requires --out).
    #[arg(long)]
    emit_csv: bool,
    /// Run suite experiments concurrently.
    #[arg(long)]
    parallel: bool,
    /// List registered experiments and exit.
    #[arg(long)]
    list: bool,
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("{msg}");
    ExitCode::from(EXIT_CONFIG as u8)
}

fn load(path: &Path, args: &Args) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(p) = args.budget {
        cfg.budget.preset = p;
    }
    if let Some(s) = args.seed {
        cfg.params.set_seed(s);
    }
    Ok(cfg)
}

fn emit(results: &[RunResult], index: Option<serde_json::Value>, args: &Args, single_output: Option<&str>) -> ExitCode {
    for r in results {
        eprintln!("{}", cli::summary_line(r));
    }
    let written = match (&args.out, single_output) {
        (Some(dir), _) => cli::write_results(dir, results, args.emit_csv).and_then(|_| match &index {
            Some(v) => std::fs::write(dir.join("suite.json"), serde_json::to_string_pretty(v).unwrap() + "\n"),
            None => Ok(()),
        }),
        (None, Some(file)) => {
            let text = serde_json::to_string_pretty(&cli::result_json(&results[0])).unwrap();
            std::fs::write(file, text + "\n")
        }
        (None, None) => {
            let v = match (&index, results) {
                (None, [one]) => cli::result_json(one),
                _ => serde_json::Value::Array(results.iter().map(cli::result_json).collect()),
            };
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("cannot write output: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    ExitCode::from(cli::exit_code(results) as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list {
        for e in cli::REGISTRY {
            let kind = if e.acceptance { "acceptance" } else { "property" };
            println!("{:<26} {:<10} [{}] {}", e.id, kind, e.tags.join(","), e.summary);
        }
        return ExitCode::SUCCESS;
    }
    if args.emit_csv && args.out.is_none() {
        return config_error("config error: --emit-csv requires --out");
    }
    if let Some(path) = &args.config {
        let cfg = match load(path, &args) {
            Ok(c) => c,
            Err(e) => return config_error(e),
        };
        if let Err(e) = cfg.budget.validate() {
            return config_error(ConfigError(e));
        }
        let results = vec![cli::run(&cfg)];
        return emit(&results, None, &args, cfg.output.as_deref());
    }
    let Some(filter) = &args.suite else {
        return config_error("config error: one of --config, --suite or --list is required");
    };
    let budget = Budget::preset(args.budget.unwrap_or_default());
    let configs = cli::suite_configs(filter, budget, args.seed);
    let results = cli::run_all(&configs, args.parallel);
    let index = cli::suite_summary(filter, &results);
    emit(&results, Some(index), &args, None)
}
