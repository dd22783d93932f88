use super::emit;
use crate::{CliError, CliResult, EXIT_VIOLATION};
use clap::Args;
use std::path::PathBuf;

#[derive(Args)]
pub struct VerifyArgs {
    /// Cases per suite, > 0.
    #[arg(long)]
    cases: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: VerifyArgs) -> CliResult {
    if args.cases == 0 {
        return Err(CliError::invalid("--cases must be positive"));
    }
    let report = genbound::verify::run_all(args.cases, args.seed)?;
    let mut json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::invalid(e.to_string()))?;
    json.push('\n');
    emit(&args.out, &json)?;
    Ok(if report.pass { 0 } else { EXIT_VIOLATION })
}
