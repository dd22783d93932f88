pub mod erm;
pub mod measure;
pub mod sweep;
pub mod verify;

use crate::CliError;
use std::io::Write;
use std::path::PathBuf;

/// Writes to the given path or stdout.
pub(crate) fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => std::io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}

/// Parses a comma-separated list of floats.
pub(crate) fn parse_f64_list(raw: &str, what: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::invalid(format!("bad {what} entry {s:?}")))
        })
        .collect()
}
