//! `react`: three-way hypothesis tests from the command line.
//!
//! Exit codes: 0 on success, 2 for invalid input or configuration, 3 when a
//! valid input cannot be computed (for example a zero-variance sample).

mod commands;
mod config;
mod error;
mod io;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, RunConfig};
use error::CliResult;

fn run(cli: Cli) -> CliResult<()> {
    let cfg = RunConfig::from_common(&cli.common)?;
    let bytes = match &cli.command {
        Command::Test {
            inputs,
            hypotheses,
            tost,
        } => commands::test(&cfg, inputs, hypotheses.as_deref(), *tost)?,
        Command::Family { inputs, hypotheses } => commands::family(&cfg, inputs, hypotheses.as_deref())?,
        Command::Meta {
            input,
            pooling,
            no_correction,
        } => commands::meta(&cfg, input, *pooling, !no_correction)?,
        Command::Simulate { input, reps, n_grid } => {
            commands::simulate(&cfg, input, *reps, n_grid.as_deref())?
        }
        Command::Bayes {
            inputs,
            prior,
            draws,
            hypotheses,
        } => commands::bayes(&cfg, inputs, prior, *draws, hypotheses.as_deref())?,
    };
    io::write_output(cfg.out.as_deref(), &bytes)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
