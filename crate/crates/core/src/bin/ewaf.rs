//! Experiment runner CLI for the exponentially weighted average forecaster.
//!
//! Two modes:
//!
//! - default: run one experiment and emit the per-round trajectory plus a
//!   final bound report (CSV or JSON);
//! - `--bound-table`: evaluate the regret-bound grid over experts × horizons
//!   × schedules instead of running anything.
//!
//! Configuration comes from an optional flat key=value file (`--config`)
//! with command-line flags overriding individual keys. Exit codes: 0 on
//! success, 2 for configuration errors, 3 when a bound or certificate check
//! fails mid-run, 1 for unexpected runtime errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use ewaf::experiment::{
    bound_table, bound_table_json, render_trajectory_csv, run_experiment, trajectory_json,
    write_bound_table_csv, OutputFormat, RawConfig, RunError, EXIT_CONFIG_ERROR,
    EXIT_RUNTIME_ERROR,
};

/// Directory that relative `--out` paths resolve against.
const OUT_DIR_ENV: &str = "EWAF_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "ewaf",
    version,
    about = "Exponentially weighted average forecasting experiments",
    after_help = "Relative --out paths resolve against $EWAF_OUT_DIR when it is set.\n\
                  Exit codes: 0 ok, 2 config error, 3 verification failure."
)]
struct Cli {
    /// Flat key=value config file; flags given here override its entries.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Number of experts (comma list with --bound-table).
    #[arg(long, value_name = "N")]
    experts: Option<String>,

    /// Number of rounds (comma list with --bound-table).
    #[arg(long, value_name = "T")]
    horizon: Option<String>,

    /// paper | cbl | constant:<v> | custom:<path> (comma list with --bound-table).
    #[arg(long, value_name = "SPEC")]
    schedule: Option<String>,

    /// abs | sq
    #[arg(long, value_name = "KIND")]
    loss: Option<String>,

    /// adaptive | bernoulli:<p> | fixed:<path>
    #[arg(long, value_name = "SPEC")]
    adversary: Option<String>,

    /// constant:<csv> | walk:<step> | fixed:<path>
    #[arg(long, value_name = "SPEC")]
    advice: Option<String>,

    /// Seed for the outcome and advice streams.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,

    /// Certify the per-round score inequalities while running.
    #[arg(long)]
    verify: bool,

    /// csv | json
    #[arg(long, value_name = "FMT")]
    format: Option<String>,

    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<String>,

    /// Emit the bound table for the configured grid instead of running.
    #[arg(long)]
    bound_table: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}

type Failure = (i32, String);

fn run(cli: Cli) -> Result<(), Failure> {
    let raw = collect_config(&cli)?;
    if cli.bound_table {
        emit_bound_table(&raw)
    } else {
        emit_experiment(&raw)
    }
}

/// Config file first, then flag overrides on top.
fn collect_config(cli: &Cli) -> Result<RawConfig, Failure> {
    let config_error = |e: &dyn std::fmt::Display| (EXIT_CONFIG_ERROR, e.to_string());
    let mut raw = match &cli.config {
        Some(path) => RawConfig::from_file(path).map_err(|e| config_error(&e))?,
        None => RawConfig::new(),
    };
    let overrides: [(&str, Option<String>); 8] = [
        ("experts", cli.experts.clone()),
        ("horizon", cli.horizon.clone()),
        ("schedule", cli.schedule.clone()),
        ("loss", cli.loss.clone()),
        ("adversary", cli.adversary.clone()),
        ("advice", cli.advice.clone()),
        ("seed", cli.seed.map(|s| s.to_string())),
        ("out", cli.out.clone()),
    ];
    for (key, value) in overrides {
        if let Some(value) = value {
            raw.set(key, &value).map_err(|e| config_error(&e))?;
        }
    }
    if let Some(format) = &cli.format {
        raw.set("format", format).map_err(|e| config_error(&e))?;
    }
    if cli.verify {
        raw.set("verify", "true").map_err(|e| config_error(&e))?;
    }
    Ok(raw)
}

fn emit_experiment(raw: &RawConfig) -> Result<(), Failure> {
    let config = raw
        .experiment()
        .map_err(|e| (EXIT_CONFIG_ERROR, e.to_string()))?;
    let result = run_experiment(&config).map_err(|e: RunError| (e.exit_code(), e.to_string()))?;
    for warning in &result.schedule_warnings {
        eprintln!("warning: {warning}");
    }
    let rendered = match config.format {
        OutputFormat::Csv => render_trajectory_csv(&result),
        OutputFormat::Json => trajectory_json(&result),
    };
    write_output(config.out.as_deref(), &rendered)
}

fn emit_bound_table(raw: &RawConfig) -> Result<(), Failure> {
    let request = raw
        .bound_table()
        .map_err(|e| (EXIT_CONFIG_ERROR, e.to_string()))?;
    let rows = bound_table(&request).map_err(|e| (e.exit_code(), e.to_string()))?;
    let rendered = match request.format {
        OutputFormat::Csv => write_bound_table_csv(&rows),
        OutputFormat::Json => bound_table_json(&rows),
    };
    write_output(request.out.as_deref(), &rendered)
}

/// Writes to the resolved path, or stdout when no path was configured.
fn write_output(out: Option<&Path>, rendered: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let resolved = resolve_out_path(path);
            std::fs::write(&resolved, rendered).map_err(|e| {
                (
                    EXIT_RUNTIME_ERROR,
                    format!("writing {}: {e}", resolved.display()),
                )
            })
        }
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn resolve_out_path(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => Path::new(&dir).join(path),
        None => path.to_path_buf(),
    }
}
