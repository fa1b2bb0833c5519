//! `oscsum` command-line front end: every module as a subcommand, reports
//! as JSON or versioned CSV, deterministic for a fixed seed and config.

mod commands;
mod config;
mod error;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use commands::Command;
use config::{Format, RunConfig};
use error::{CliError, CliResult};
use output::Envelope;

#[derive(Parser, Debug)]
#[command(name = "oscsum", version, about = "Polynomial exponential sums, coefficient norms and discrete Carleson operators")]
struct Cli {
    /// Seed for every random stream
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat `key = value` configuration file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set max_q=5000` (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

/// Sizes the global pool from `OSCSUM_THREADS` (default: all cores).
fn init_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("OSCSUM_THREADS") else { return Ok(()) };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n >= 1 => n,
        _ => return Err(CliError::Usage(format!("OSCSUM_THREADS must be a positive integer, got `{raw}`"))),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn build_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    for pair in &cli.set {
        cfg.assign(pair)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(format) = cli.format {
        cfg.format = format;
    }
    cli.command.adjust_config(&mut cfg);
    Ok(cfg)
}

fn run(cli: &Cli) -> CliResult<()> {
    init_threads()?;
    let cfg = build_config(cli)?;
    let outcome = cli.command.run(&cfg)?;
    let mut input = serde_json::to_value(&cli.command).map_err(|e| CliError::Output(e.to_string()))?;
    if let Value::Object(m) = &mut input {
        m.extend(outcome.input);
    }
    let envelope = Envelope::new(cli.command.name(), &cfg, input, outcome.result);
    let bytes = output::render(&envelope, cfg.format)?;
    output::emit(&bytes, cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oscsum: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
