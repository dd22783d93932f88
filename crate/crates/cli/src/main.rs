//! `genbound` command line: compute divergences, run the Gaussian
//! case-study sweep, run the verification suites, and solve regularized
//! ERM instances.
//!
//! Exit codes: 0 success, 1 verification violation, 2 invalid flags or
//! malformed input, 3 numeric-accuracy failure, 4 solver non-convergence.

mod commands;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "genbound", version, about = "Information-measure generalization bounds", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Divergence between two finite distributions.
    Measure(commands::measure::MeasureArgs),
    /// Gaussian case-study sweep over t; CSV output.
    Sweep(commands::sweep::SweepArgs),
    /// Identity, inequality and bound-soundness suites; JSON report.
    Verify(commands::verify::VerifyArgs),
    /// Solve a divergence-regularized ERM instance; JSON report.
    Erm(commands::erm::ErmArgs),
}

pub(crate) const EXIT_VIOLATION: u8 = 1;
pub(crate) const EXIT_INVALID: u8 = 2;
pub(crate) const EXIT_ACCURACY: u8 = 3;
pub(crate) const EXIT_NO_CONVERGENCE: u8 = 4;

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_thread_pool();
    let outcome = match cli.command {
        Command::Measure(args) => commands::measure::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Verify(args) => commands::verify::run(args),
        Command::Erm(args) => commands::erm::run(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// GENBOUND_THREADS caps parallelism; 0 or unset means automatic.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("GENBOUND_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

/// CLI-level error with its process exit code.
#[derive(Debug)]
pub(crate) struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INVALID, message: message.into() }
    }

    pub fn accuracy(message: impl Into<String>) -> Self {
        CliError { code: EXIT_ACCURACY, message: message.into() }
    }

    pub fn no_convergence(message: impl Into<String>) -> Self {
        CliError { code: EXIT_NO_CONVERGENCE, message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<genbound::Error> for CliError {
    fn from(e: genbound::Error) -> Self {
        let code = match &e {
            genbound::Error::Accuracy { .. } => EXIT_ACCURACY,
            genbound::Error::NonConvergence { .. } => EXIT_NO_CONVERGENCE,
            _ => EXIT_INVALID,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::invalid(e.to_string())
    }
}

pub(crate) type CliResult = Result<u8, CliError>;
