//! `sigasym`: reproducible runs of the signature-norm routes.
//!
//! ```text
//! sigasym run --curve circle.toml --degrees 2..6 --route tensor --route mc-product --seed 7
//! sigasym compare --curve axis.toml --degrees 2 --route tensor --route mc-product --seed 1
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod output;
mod routes;
mod spec;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::config::{Format, ResolvedConfig, RunArgs};
use crate::error::CliError;
use crate::output::{compare_report, strip_timing, write_csv, write_json};

#[derive(Debug, Parser)]
#[command(
    name = "sigasym",
    version,
    about = "Signature norm asymptotics: tensor, Monte Carlo and limit routes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the selected routes and emit one row per (route, degree).
    Run(RunArgs),
    /// As `run`, plus pairwise z-scores between routes at each degree.
    /// The report is embedded in JSON output, or printed to stderr for CSV.
    /// Exits 1 if any pair disagrees beyond 3σ.
    Compare(RunArgs),
}

fn execute(args: &RunArgs, compare: bool) -> Result<bool, CliError> {
    let config = ResolvedConfig::from_args(args)?;
    let mut records = routes::evaluate(&config)?;
    if args.no_timing {
        strip_timing(&mut records);
    }
    let report = compare.then(|| compare_report(&records, config.tolerance));

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => {
            Box::new(File::create(path).map_err(|e| CliError::validation("output-unwritable", format!("{path}: {e}")))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match args.format {
        Format::Csv => {
            write_csv(&mut sink, &records)?;
            if let Some(r) = &report {
                let line = serde_json::to_string(r).expect("report serializes");
                eprintln!("{line}");
            }
        }
        Format::Json => write_json(&mut sink, &config, &records, report.as_ref())?,
    }
    sink.flush()
        .map_err(|e| CliError::numerical("write-failed", e.to_string()))?;
    Ok(report.is_none_or(|r| r.pass))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", CliError::validation("bad-arguments", first).to_json_line());
            return ExitCode::from(2);
        }
    };
    let (args, compare) = match &cli.command {
        Command::Run(a) => (a, false),
        Command::Compare(a) => (a, true),
    };
    match execute(args, compare) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code())
        }
    }
}
