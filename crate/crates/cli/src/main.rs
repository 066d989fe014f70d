//! `dipolar`: batch front end for the phase-gate analyses in `dipolar-core`.
//!
//! Exit status: 0 on success, 2 when the input is rejected, 1 when a
//! computation fails.

mod args;
mod commands;
mod error;
mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, ConfigCommand, Format, RunConfig};
use error::{CliError, CliResult};
use output::Report;

fn dispatch(cmd: &ConfigCommand, seed: Option<u64>) -> CliResult<Report> {
    match cmd {
        ConfigCommand::PhaseError(a) => commands::phase_error(a, seed),
        ConfigCommand::Gate(a) => commands::gate(a),
        ConfigCommand::Feasibility(a) => commands::feasibility(a),
        ConfigCommand::Hyperfine(a) => commands::hyperfine(a),
        ConfigCommand::Sweep(a) => commands::sweep(a),
        ConfigCommand::Reproduce(a) => commands::reproduce(a, seed),
    }
}

fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn emit(text: &str, path: Option<&PathBuf>) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let (cmd, format, output, seed) = match cli.command {
        Command::Run(r) => {
            let cfg = load_config(&r.config)?;
            (cfg.command, cli.format.or(cfg.format), cli.output.or(cfg.output), cfg.seed)
        }
        Command::PhaseError(a) => (ConfigCommand::PhaseError(a), cli.format, cli.output, None),
        Command::Gate(a) => (ConfigCommand::Gate(a), cli.format, cli.output, None),
        Command::Feasibility(a) => (ConfigCommand::Feasibility(a), cli.format, cli.output, None),
        Command::Hyperfine(a) => (ConfigCommand::Hyperfine(a), cli.format, cli.output, None),
        Command::Sweep(a) => (ConfigCommand::Sweep(a), cli.format, cli.output, None),
        Command::Reproduce(a) => (ConfigCommand::Reproduce(a), cli.format, cli.output, None),
    };
    let report = dispatch(&cmd, seed)?;
    emit(&report.render(format.unwrap_or(Format::Table))?, output.as_ref())?;
    match report.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dipolar: {e}");
            e.exit_code()
        }
    }
}
