use super::{emit, parse_f64_list};
use crate::{CliError, CliResult};
use clap::Args;
use genbound::measures::{js_div, kl, renyi_div, Alpha, ProbVec};
use std::path::PathBuf;

#[derive(Args)]
pub struct MeasureArgs {
    /// First distribution as comma-separated masses.
    #[arg(long)]
    p: String,
    /// Second distribution as comma-separated masses.
    #[arg(long)]
    q: String,
    /// kl | js | renyi
    #[arg(long)]
    kind: String,
    /// Order parameter for js/renyi, in (0,1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: MeasureArgs) -> CliResult {
    let p = ProbVec::from_mass(parse_f64_list(&args.p, "--p")?)?;
    let q = ProbVec::from_mass(parse_f64_list(&args.q, "--q")?)?;
    let need_alpha = || {
        args.alpha
            .ok_or_else(|| CliError::invalid("--alpha required for this kind"))
            .and_then(|a| Alpha::new(a).map_err(CliError::from))
    };
    let value = match args.kind.as_str() {
        "kl" => kl(&p, &q)?,
        "js" => js_div(&p, &q, need_alpha()?)?,
        "renyi" => renyi_div(&p, &q, need_alpha()?)?,
        other => return Err(CliError::invalid(format!("unknown kind {other:?}"))),
    };
    let json = format!(
        "{{\"schema\":\"genbound-measure-1\",\"kind\":\"{}\",\"alpha\":{},\"value\":{}}}\n",
        args.kind,
        args.alpha.map_or("null".into(), |a| a.to_string()),
        if value.is_infinite() { "\"inf\"".to_string() } else { value.to_string() },
    );
    emit(&args.out, &json)?;
    Ok(0)
}
