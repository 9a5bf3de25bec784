//! Command-line front end for `wavefocus`: JSON configurations in, field
//! files and deterministic JSON reports out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::Outcome;
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "wavefocus",
    version,
    about = "Design potentials that scatter a plane wave into a prescribed far field"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Paths {
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created when missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a source, apply the cutoff and write the designed potential.
    Design {
        #[command(flatten)]
        paths: Paths,
        /// Seed of a synthetic target, overriding the configuration.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve the scattering problem for a potential.
    Forward {
        #[command(flatten)]
        paths: Paths,
        /// Relative residual tolerance of the solver.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Solve for a designed potential and compare with its prediction.
    Verify {
        #[command(flatten)]
        paths: Paths,
        /// Relative residual tolerance of the solver.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Replace a designed potential by particle clouds and compare.
    Ensemble {
        #[command(flatten)]
        paths: Paths,
        /// First sampling seed, overriding the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Relative residual tolerance of the forward solver.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Singular values of the discretized far-field map.
    Diagnose {
        #[command(flatten)]
        paths: Paths,
    },
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Design { paths, seed } => commands::design(&paths.config, &paths.out, *seed),
        Command::Forward { paths, tol } => commands::forward(&paths.config, &paths.out, *tol),
        Command::Verify { paths, tol } => commands::verify(&paths.config, &paths.out, *tol),
        Command::Ensemble { paths, seed, tol } => commands::ensemble(&paths.config, &paths.out, *seed, *tol),
        Command::Diagnose { paths } => commands::diagnose(&paths.config, &paths.out),
    }
}

/// Runs a command and maps the result to an exit status, printing errors
/// as JSON on stderr.
pub fn exit_code(cli: &Cli) -> i32 {
    let err = match run(cli) {
        Ok(o) if o.passed => return 0,
        Ok(o) => CliError::Numerical(o.message),
        Err(e) => e,
    };
    eprintln!("{}", err.to_json());
    err.exit_code()
}
