use super::emit;
use crate::{CliError, CliResult};
use clap::Args;
use genbound::bounds::{gen_bound, BoundKind, SubGaussianParams};
use genbound::erm::{solve_regularized_posterior, LearnerInstance, Regularizer};
use genbound::measures::{info_measure, Alpha, InfoKind};
use genbound::oracle::{dataset_index, enumerate_learner};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Args)]
pub struct ErmArgs {
    /// Instance file: JSON with z_atoms, mu, w_atoms, loss, n, beta, prior.
    #[arg(long)]
    instance: PathBuf,
    /// js | renyi
    #[arg(long)]
    reg: String,
    /// Order parameter in (0,1).
    #[arg(long)]
    alpha: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct DatasetSolution {
    dataset: Vec<usize>,
    probability: f64,
    posterior: Vec<f64>,
    objective: f64,
    certificate: f64,
    iterations: usize,
    min_mass: f64,
}

#[derive(Serialize)]
struct ErmReport {
    schema: String,
    regularizer: String,
    alpha: f64,
    excess_risk: f64,
    gen_error_exact: f64,
    max_certificate: f64,
    bounds: Vec<genbound::BoundReport>,
    solutions: Vec<DatasetSolution>,
}

pub fn run(args: ErmArgs) -> CliResult {
    let raw = std::fs::read_to_string(&args.instance)
        .map_err(|e| CliError::invalid(format!("cannot read instance: {e}")))?;
    let inst: LearnerInstance = serde_json::from_str(&raw)
        .map_err(|e| CliError::invalid(format!("malformed instance: {e}")))?;
    inst.validate()?;
    let alpha = Alpha::new(args.alpha)?;
    let reg = match args.reg.as_str() {
        "js" => Regularizer::Js(alpha),
        "renyi" => Regularizer::Renyi(alpha),
        other => return Err(CliError::invalid(format!("unknown regularizer {other:?}"))),
    };

    let datasets = inst.all_datasets()?;
    let mut solutions = Vec::with_capacity(datasets.len());
    let mut table = vec![Vec::new(); datasets.len()];
    let mut max_certificate = 0.0f64;
    for s in &datasets {
        let sol = solve_regularized_posterior(&inst, s, reg).map_err(|e| match e {
            genbound::Error::NonConvergence { iterations, certificate, .. } => {
                CliError::no_convergence(format!(
                    "dataset {s:?}: no convergence after {iterations} iterations, certificate {certificate:.3e}"
                ))
            }
            other => CliError::from(other),
        })?;
        max_certificate = max_certificate.max(sol.certificate);
        table[dataset_index(s, inst.z_atoms.len())] = sol.posterior.clone();
        solutions.push(DatasetSolution {
            dataset: s.clone(),
            probability: inst.dataset_prob(s),
            posterior: sol.posterior,
            objective: sol.objective,
            certificate: sol.certificate,
            iterations: sol.iterations,
            min_mass: sol.min_mass,
        });
    }

    // Exact excess risk and generalization error of the solved kernel, plus
    // the matching information bounds on its per-sample joints.
    let nz = inst.z_atoms.len();
    let kernel = move |s: &[usize]| table[dataset_index(s, nz)].clone();
    let enumerated = enumerate_learner(&inst, &kernel)?;
    let excess = genbound::erm::excess_risk_exact(&inst, &kernel)?;

    let (lo, hi) = inst
        .loss
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| {
            (lo.min(l), hi.max(l))
        });
    let sg = SubGaussianParams::from_loss_range(lo, hi)?;
    let mut bounds = Vec::new();
    for kind in [BoundKind::Js(alpha), BoundKind::Renyi(alpha)] {
        let info: Vec<f64> = enumerated
            .per_sample_joints
            .iter()
            .map(|j| {
                let k = match kind {
                    BoundKind::Js(a) => InfoKind::Js(a),
                    _ => InfoKind::Renyi(alpha),
                };
                info_measure(j, k).unwrap()
            })
            .collect();
        bounds.push(gen_bound(&info, kind, &sg)?);
    }

    let report = ErmReport {
        schema: "genbound-erm-1".into(),
        regularizer: args.reg.clone(),
        alpha: args.alpha,
        excess_risk: excess,
        gen_error_exact: enumerated.exact_gen,
        max_certificate,
        bounds,
        solutions,
    };
    let mut json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::invalid(e.to_string()))?;
    json.push('\n');
    emit(&args.out, &json)?;
    Ok(0)
}
