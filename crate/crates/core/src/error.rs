use thiserror::Error;

/// Errors surfaced by the library.
///
/// Extended-real outcomes (a divergence of `+inf`) are *values*, not errors;
/// errors are reserved for malformed inputs, guard violations and
/// non-converged numerics.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alpha must lie strictly inside (0,1), got {0}")]
    InvalidAlpha(f64),

    #[error("missing parameter for requested bound: {0}")]
    MissingParameter(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration guard exceeded: {datasets} datasets > {limit}")]
    SizeGuard { datasets: u128, limit: u64 },

    #[error("solver did not converge after {iterations} iterations (certificate {certificate:.3e})")]
    NonConvergence {
        iterations: usize,
        certificate: f64,
        /// Best iterate found, reported so callers can inspect it.
        best: Vec<f64>,
    },

    #[error("requested accuracy {requested:.3e} not reached, achieved {achieved:.3e}")]
    Accuracy { requested: f64, achieved: f64 },

    #[error("domain error: {0}")]
    Domain(String),
}
