use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

mod config;
mod error;
mod output;
mod run;

use config::{Command, Format, ScenarioConfig, SCHEMA_VERSION};
use error::CliError;

/// Spin-chain transport experiments driven by JSON scenario files.
#[derive(Debug, Parser)]
#[command(name = "spinlab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file; its `command` must match the subcommand.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long, env = "SPINLAB_WORKERS")]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn load(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let mut cfg = ScenarioConfig::from_path(&cli.config)?;
    if cfg.command != cli.command {
        return Err(CliError::Validation(format!(
            "subcommand {:?} does not match config command {:?}",
            cli.command, cfg.command
        )));
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if let Some(format) = cli.format {
        cfg.output.format = format;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<PathBuf, CliError> {
    let cfg = load(cli)?;
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Validation("--workers must be positive".into()));
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let started = Instant::now();
    let outcome = run::run_scenario(&cfg)?;
    let elapsed = started.elapsed().as_secs_f64();

    let mut results = outcome.results;
    if cfg.output.format == Format::Json {
        results["table"] = outcome.table.to_json();
    }
    let report = json!({
        "config": serde_json::to_value(&cfg).expect("configs serialize"),
        "results": results,
        "schema_version": SCHEMA_VERSION,
        "seed": cfg.seed,
        "tool_version": env!("CARGO_PKG_VERSION"),
    });

    let dir = Path::new(&cfg.output.dir);
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    if cfg.output.format == Format::Csv {
        let name = format!("{}.csv", serde_json::to_value(cfg.command).expect("enum").as_str().expect("string"));
        output::write_file(&dir.join(name), &outcome.table.to_csv())?;
    }
    output::write_file(&dir.join("report.json"), &output::canonical_json(&report))?;
    output::write_file(&dir.join("timing.json"), &output::canonical_json(&json!({ "wall_clock_s": elapsed })))?;
    Ok(dir.to_path_buf())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(dir) => {
            eprintln!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
