//! `cavity-duo`: spectra, time evolution, CP-plane data, parameter sweeps and
//! the oracle validation suite for two interacting atoms in a cavity.

mod commands;
mod config;
mod error;
mod table;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{resolve, Flags};
use crate::error::CliError;
use crate::table::emit;

#[derive(Debug, Parser)]
#[command(name = "cavity-duo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues, eigenvectors and residuals of one sector block.
    Spectrum(Flags),
    /// Amplitudes, purity and concurrence on a time grid.
    Evolve(Flags),
    /// Concurrence–purity trajectory with reference curves.
    Cpplane(Flags),
    /// Cartesian product over comma-separated parameter lists, one file per point.
    Sweep(Flags),
    /// Oracle-equivalence suite; exit status 0 iff every check passes.
    Validate(Flags),
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Spectrum(flags) => {
            let cfg = resolve(&flags, false)?;
            emit(cfg.out.as_deref(), &commands::spectrum(&cfg.point())?.encode(cfg.format)?)?;
        }
        Command::Evolve(flags) => {
            let cfg = resolve(&flags, false)?;
            let table = commands::evolve(&cfg.point(), cfg.tmax, cfg.dt)?;
            emit(cfg.out.as_deref(), &table.encode(cfg.format)?)?;
        }
        Command::Cpplane(flags) => {
            let cfg = resolve(&flags, false)?;
            let table = commands::cpplane(&cfg.point(), cfg.tmax, cfg.dt)?;
            emit(cfg.out.as_deref(), &table.encode(cfg.format)?)?;
        }
        Command::Sweep(flags) => {
            let cfg = resolve(&flags, true)?;
            let written = commands::sweep(&cfg)?;
            eprintln!("wrote {} files", written.len());
        }
        Command::Validate(flags) => {
            let cfg = resolve(&flags, false)?;
            let results = commands::validate(cfg.seed)?;
            for r in &results {
                let (status, rel) = match (r.passed(), r.lower_bound) {
                    (true, false) => ("PASS", "<="),
                    (true, true) => ("PASS", ">="),
                    (false, false) => ("FAIL", "<="),
                    (false, true) => ("FAIL", ">="),
                };
                println!("{status}  {:<40} {:.3e} {rel} {:.1e}", r.name, r.value, r.tolerance);
            }
            if let Some(path) = cfg.out.as_deref() {
                emit(Some(path), &commands::validation_table(&results).encode(cfg.format)?)?;
            }
            if !results.iter().all(|r| r.passed()) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            match &err {
                CliError::Usage(lines) => {
                    for line in lines {
                        eprintln!("error: {line}");
                    }
                }
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(err.exit_code())
        }
    }
}
