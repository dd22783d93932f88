use super::LearnerInstance;
use crate::error::Error;
use crate::measures::{Alpha, ProbVec};
use crate::numeric::stable_sum;
use crate::Result;
use serde::Serialize;

/// Divergence used to regularize the per-dataset posterior toward the prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    /// α-JS divergence: α KL(prior‖m) + (1-α) KL(p‖m), m = α prior + (1-α) p.
    Js(Alpha),
    /// α-Rényi divergence (1/(α-1)) log Σ p^α prior^{1-α}; recovers the KL
    /// regularizer (and hence the Gibbs posterior) as α -> 1.
    Renyi(Alpha),
    /// Plain KL(p‖prior); reference mode whose exact solution is the Gibbs
    /// posterior.
    Kl,
}

/// Solver output: posterior with its objective value and the first-order
/// optimality certificate (max KKT residual over hypotheses).
#[derive(Debug, Clone, Serialize)]
pub struct RegularizedSolution {
    pub posterior: Vec<f64>,
    pub objective: f64,
    pub certificate: f64,
    pub iterations: usize,
    /// Smallest posterior mass; flags proximity to the simplex boundary.
    pub min_mass: f64,
}

const GTOL: f64 = 1e-8;
const MAX_ITERS: usize = 100_000;
const MASS_FLOOR: f64 = 1e-300;

/// Divergence value D(p ‖ prior) for the chosen regularizer.
///
/// Every log of a near-unit ratio goes through `ln_1p` of an exactly formed
/// difference: at small β the objective multiplies D by a large 1/β, and
/// plain `ln(p/q)` noise would otherwise drown the improvements the line
/// search needs to see.
pub fn regularizer_value(reg: Regularizer, p: &[f64], prior: &[f64]) -> f64 {
    reg_value(reg, p, prior)
}

/// Analytic gradient of D(p ‖ prior) in p at an interior point.
pub fn regularizer_gradient(reg: Regularizer, p: &[f64], prior: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len()];
    reg_gradient(reg, p, prior, &mut out);
    out
}

pub(crate) fn reg_value(reg: Regularizer, p: &[f64], prior: &[f64]) -> f64 {
    match reg {
        Regularizer::Kl => {
            let terms: Vec<f64> = p
                .iter()
                .zip(prior)
                .filter(|(&pi, _)| pi > 0.0)
                .map(|(&pi, &qi)| pi * ln_from_diff((pi - qi) / qi, pi / qi))
                .collect();
            stable_sum(&terms)
        }
        Regularizer::Js(a) => {
            // m = α q + (1-α) p, so q - m = (1-α)(q - p) and p - m = α (p - q).
            let a = a.value();
            let mut terms = Vec::with_capacity(2 * p.len());
            for (&pi, &qi) in p.iter().zip(prior) {
                let m = a * qi + (1.0 - a) * pi;
                if qi > 0.0 {
                    terms.push(a * qi * ln_from_diff((1.0 - a) * (qi - pi) / m, qi / m));
                }
                if pi > 0.0 {
                    terms.push((1.0 - a) * pi * ln_from_diff(a * (pi - qi) / m, pi / m));
                }
            }
            stable_sum(&terms)
        }
        Regularizer::Renyi(a) => {
            // Σ p^α q^{1-α} = 1 + Σ q expm1(α ln(p/q)), so the log stays
            // accurate when p is close to the prior.
            let a = a.value();
            let terms: Vec<f64> = p
                .iter()
                .zip(prior)
                .map(|(&pi, &qi)| {
                    if pi > 0.0 && qi > 0.0 {
                        qi * (a * ((pi - qi) / qi).ln_1p()).exp_m1()
                    } else {
                        -qi
                    }
                })
                .collect();
            stable_sum(&terms).ln_1p() / (a - 1.0)
        }
    }
}

/// Gradient of D(p ‖ prior) in p, valid at interior points.
pub(crate) fn reg_gradient(reg: Regularizer, p: &[f64], prior: &[f64], out: &mut [f64]) {
    match reg {
        Regularizer::Kl => {
            for ((g, &pi), &qi) in out.iter_mut().zip(p).zip(prior) {
                *g = ln_from_diff((pi - qi) / qi, pi / qi) + 1.0;
            }
        }
        Regularizer::Js(a) => {
            // d/dp_i [α KL(q‖m) + (1-α) KL(p‖m)] = (1-α) log(p_i/m_i).
            let a = a.value();
            for ((g, &pi), &qi) in out.iter_mut().zip(p).zip(prior) {
                let m = a * qi + (1.0 - a) * pi;
                *g = (1.0 - a) * ln_from_diff(a * (pi - qi) / m, pi / m);
            }
        }
        Regularizer::Renyi(a) => {
            let a = a.value();
            let s: f64 = p
                .iter()
                .zip(prior)
                .map(|(&pi, &qi)| pi.powf(a) * qi.powf(1.0 - a))
                .sum();
            for ((g, &pi), &qi) in out.iter_mut().zip(p).zip(prior) {
                *g = a / (a - 1.0) * pi.powf(a - 1.0) * qi.powf(1.0 - a) / s;
            }
        }
    }
}

/// Minimizes Σ_w p(w) L_E(w,s) + (1/β) D(p ‖ prior) over the simplex by
/// entropic mirror descent with backtracking, falling back to a small-step
/// exponentiated-gradient move when no backtracked step improves.
///
/// The conditional divergence decomposes over datasets, so each dataset is
/// an independent solve. Posterior mass is floored at 1e-300 during
/// iteration to keep log terms finite; the returned posterior is
/// renormalized without the floor.
pub fn solve_regularized_posterior(
    inst: &LearnerInstance,
    s: &[usize],
    reg: Regularizer,
) -> Result<RegularizedSolution> {
    inst.validate()?;
    if s.iter().any(|&z| z >= inst.z_atoms.len()) {
        return Err(Error::Precondition("dataset atom out of range".into()));
    }
    let k = inst.w_atoms.len();
    let losses: Vec<f64> = (0..k).map(|w| inst.empirical_risk(w, s)).collect();
    let prior = &inst.prior;
    let inv_beta = if inst.beta > 0.0 { 1.0 / inst.beta } else { f64::INFINITY };

    // β = 0 is the degenerate fully-regularized problem: the prior wins.
    if inst.beta == 0.0 {
        return Ok(RegularizedSolution {
            posterior: prior.clone(),
            objective: losses.iter().zip(prior).map(|(l, p)| l * p).sum(),
            certificate: 0.0,
            iterations: 0,
            min_mass: prior.iter().copied().fold(f64::INFINITY, f64::min),
        });
    }

    let objective = |p: &[f64]| -> f64 {
        let fit: f64 = p.iter().zip(&losses).map(|(pi, li)| pi * li).sum();
        fit + inv_beta * reg_value(reg, p, prior)
    };
    let gradient = |p: &[f64], out: &mut [f64]| {
        reg_gradient(reg, p, prior, out);
        for (g, &l) in out.iter_mut().zip(&losses) {
            *g = l + inv_beta * *g;
        }
    };

    let mut p = prior.clone();
    let mut grad = vec![0.0; k];
    let mut obj = objective(&p);
    let mut step = 1.0;
    let mut iterations = 0;

    // KKT residual relative to the multiplier scale: interior coordinates
    // must share λ = Σ p g, zero coordinates only need g >= λ. Gradients
    // carry a constant part of order 1/β, so the residual is normalized by
    // 1 + |λ| to keep the 1e-8 target meaningful across temperatures.
    let certificate_of = |p: &[f64], grad: &[f64]| -> f64 {
        let lambda: f64 = p.iter().zip(grad).map(|(pi, gi)| pi * gi).sum();
        let worst = p
            .iter()
            .zip(grad)
            .map(|(&pi, &gi)| {
                if pi > 1e-12 {
                    (gi - lambda).abs()
                } else {
                    (lambda - gi).max(0.0)
                }
            })
            .fold(0.0, f64::max);
        worst / (1.0 + lambda.abs())
    };

    let mut cert = f64::INFINITY;
    while iterations < MAX_ITERS {
        gradient(&p, &mut grad);
        cert = certificate_of(&p, &grad);
        if cert <= GTOL {
            break;
        }
        // The constant gradient component cancels in the normalization, so
        // the mirror step sees only the centered part; this keeps exponents
        // small near the optimum and for extreme 1/β scales.
        let lambda: f64 = p.iter().zip(&grad).map(|(pi, gi)| pi * gi).sum();
        let centered: Vec<f64> = grad.iter().map(|g| g - lambda).collect();
        let scale = centered.iter().fold(0.0f64, |m, g| m.max(g.abs())).max(1e-300);
        let mut eta = (step / scale).min(1e12);
        let mut accepted = false;
        for _ in 0..60 {
            let cand = md_step(&p, &centered, eta);
            let cand_obj = objective(&cand);
            if cand_obj < obj {
                p = cand;
                obj = cand_obj;
                accepted = true;
                step = (step * 1.5).min(16.0);
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            // Objective decreases have fallen below float resolution while
            // the certificate is still above target: polish with fixed
            // conservative exponentiated-gradient steps accepted on
            // certificate decrease alone. The geometric ladder reaches the
            // tiny steps an ill-conditioned 1/β curvature demands.
            let mut polished = false;
            let mut div = 4.0;
            while div <= 4.0f64.powi(32) {
                let cand = md_step(&p, &centered, 1.0 / (div * scale));
                let mut cand_grad = vec![0.0; k];
                gradient(&cand, &mut cand_grad);
                if certificate_of(&cand, &cand_grad) < cert {
                    obj = objective(&cand);
                    p = cand;
                    polished = true;
                    break;
                }
                div *= 4.0;
            }
            if !polished {
                break; // stationary to machine precision
            }
            step = (step * 0.5).max(1e-6);
        }
        iterations += 1;
    }

    gradient(&p, &mut grad);
    cert = cert.min(certificate_of(&p, &grad));
    // Report without the iteration floor.
    let total = stable_sum(&p);
    let posterior: Vec<f64> = p.iter().map(|x| x / total).collect();
    let min_mass = posterior.iter().copied().fold(f64::INFINITY, f64::min);
    let solution = RegularizedSolution {
        posterior,
        objective: obj,
        certificate: cert,
        iterations,
        min_mass,
    };
    if cert > GTOL {
        return Err(Error::NonConvergence {
            iterations,
            certificate: cert,
            best: solution.posterior,
        });
    }
    Ok(solution)
}

/// Stable log of a ratio given its exactly formed deviation from one:
/// `ln_1p(diff)` keeps the digits the small-β line search needs when the
/// ratio is near one; the plain `ratio.ln()` fallback avoids the -inf that
/// `ln_1p` produces when a rounded difference lands exactly on -1.
fn ln_from_diff(diff: f64, ratio: f64) -> f64 {
    if diff.abs() < 0.5 {
        diff.ln_1p()
    } else {
        ratio.ln()
    }
}

/// Mirror-descent step p ∝ p · exp(-η g), exponent clamped and mass floored.
fn md_step(p: &[f64], grad: &[f64], eta: f64) -> Vec<f64> {
    let mut out: Vec<f64> = p
        .iter()
        .zip(grad)
        .map(|(&pi, &gi)| {
            let arg = (-eta * gi).clamp(-50.0, 50.0);
            (pi * arg.exp()).max(MASS_FLOOR)
        })
        .collect();
    let total = stable_sum(&out);
    for x in &mut out {
        *x /= total;
    }
    out
}

/// Convenience wrapper returning only the posterior as a `ProbVec`.
pub fn regularized_posterior(
    inst: &LearnerInstance,
    s: &[usize],
    reg: Regularizer,
) -> Result<ProbVec> {
    let sol = solve_regularized_posterior(inst, s, reg)?;
    ProbVec::new(inst.w_atoms.clone(), sol.posterior)
}
