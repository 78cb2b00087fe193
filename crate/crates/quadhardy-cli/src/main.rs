//! Command-line driver: evaluate decay certificates for quadratic quantum
//! flows, sweep them over time grids, and run the self-verification
//! suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 numeric error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{CliError, OutputFormat, Resolved};

#[derive(Parser)]
#[command(
    name = "quadhardy",
    version,
    about = "Decay certificates for quadratic quantum flows",
    long_about = "Evaluates the uniqueness certificate (2 hbar)^2 ||B(T)||^2 alpha beta > 1 \
                  for Schrodinger evolutions generated by real quadratic Hamiltonians, \
                  sweeps it over time grids, and verifies the underlying phase-space \
                  transport numerically."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the certificate at the configured single time
    Analyze(RunArgs),
    /// Tabulate the certificate across the configured time grid
    Sweep(RunArgs),
    /// Run the covariance and block-identity suites at the configured scale
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Write output to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (default: json for analyze/verify, csv for sweep)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn load_resolved(args: &RunArgs) -> Result<Resolved, CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        CliError::Config(format!(
            "cannot read config {}: {e}",
            args.config.display()
        ))
    })?;
    config::load(&text)
}

/// Flag beats config file beats per-command default.
fn pick_format(args: &RunArgs, resolved: &Resolved, default: OutputFormat) -> OutputFormat {
    args.format
        .map(OutputFormat::from)
        .or(resolved.output.as_ref().and_then(|o| o.format))
        .unwrap_or(default)
}

fn deliver(args: &RunArgs, resolved: &Resolved, text: &str) -> Result<(), CliError> {
    let path = args
        .out
        .clone()
        .or_else(|| resolved.output.as_ref().and_then(|o| o.path.clone()));
    match path {
        Some(path) => std::fs::write(&path, text).map_err(|e| {
            CliError::Config(format!("cannot write output {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Analyze(args) => {
            let resolved = load_resolved(&args)?;
            let format = pick_format(&args, &resolved, OutputFormat::Json);
            let text = commands::cmd_analyze(&resolved, format)?;
            deliver(&args, &resolved, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(args) => {
            let resolved = load_resolved(&args)?;
            let format = pick_format(&args, &resolved, OutputFormat::Csv);
            let text = commands::cmd_sweep(&resolved, format)?;
            deliver(&args, &resolved, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let resolved = load_resolved(&args)?;
            if matches!(
                pick_format(&args, &resolved, OutputFormat::Json),
                OutputFormat::Csv
            ) {
                return Err(CliError::Config(
                    "verify reports are JSON; csv is not supported for this command".into(),
                ));
            }
            let (text, all_passed) = commands::cmd_verify(&resolved)?;
            deliver(&args, &resolved, &text)?;
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}
