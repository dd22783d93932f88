//! Divergence-regularized empirical risk minimization on finite spaces.
//!
//! The Gibbs posterior is the closed-form solution of the KL-regularized
//! problem; the JS- and Rényi-regularized posteriors are found by entropic
//! mirror descent on the simplex. Excess risk is computed exactly by
//! enumerating datasets, and the excess-risk bound evaluators live here as
//! plain formulas over caller-supplied information values.

mod solver;

pub use solver::{
    regularized_posterior, regularizer_gradient, regularizer_value, solve_regularized_posterior,
    RegularizedSolution, Regularizer,
};

use crate::error::Error;
use crate::measures::{binary_entropy, Alpha, ProbVec};
use crate::numeric::{logsumexp, stable_sum};
use crate::Result;
use serde::{Deserialize, Serialize};

/// Hard cap on |Z|^n for exact enumeration.
pub const ENUMERATION_GUARD: u64 = 1_000_000;

/// A fully specified finite learning problem: sample law, loss table,
/// sample count, inverse temperature and prior over hypotheses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LearnerInstance {
    pub z_atoms: Vec<String>,
    /// Data-generating law over `z_atoms`.
    pub mu: Vec<f64>,
    pub w_atoms: Vec<String>,
    /// loss[w][z], finite.
    pub loss: Vec<Vec<f64>>,
    pub n: usize,
    /// Inverse temperature balancing fit against regularization.
    pub beta: f64,
    /// Prior over hypotheses, strictly positive.
    pub prior: Vec<f64>,
}

impl LearnerInstance {
    pub fn validate(&self) -> Result<()> {
        let mu = ProbVec::new(self.z_atoms.clone(), self.mu.clone())?;
        let prior = ProbVec::new(self.w_atoms.clone(), self.prior.clone())?;
        if prior.mass().iter().any(|&p| p <= 0.0) {
            return Err(Error::InvalidDistribution("prior must have full support".into()));
        }
        if self.loss.len() != self.w_atoms.len()
            || self.loss.iter().any(|row| row.len() != self.z_atoms.len())
        {
            return Err(Error::Precondition("loss table shape mismatch".into()));
        }
        if self.loss.iter().flatten().any(|l| !l.is_finite()) {
            return Err(Error::Precondition("loss values must be finite".into()));
        }
        if self.n == 0 {
            return Err(Error::Precondition("need n >= 1".into()));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::Precondition(format!("bad beta {}", self.beta)));
        }
        drop((mu, prior));
        Ok(())
    }

    pub fn mu_vec(&self) -> ProbVec {
        ProbVec::new(self.z_atoms.clone(), self.mu.clone()).expect("validated")
    }

    pub fn prior_vec(&self) -> ProbVec {
        ProbVec::new(self.w_atoms.clone(), self.prior.clone()).expect("validated")
    }

    /// Empirical risk of hypothesis `w` on dataset `s` (atom indices).
    pub fn empirical_risk(&self, w: usize, s: &[usize]) -> f64 {
        let terms: Vec<f64> = s.iter().map(|&z| self.loss[w][z]).collect();
        stable_sum(&terms) / s.len() as f64
    }

    /// Population risk of hypothesis `w` under mu.
    pub fn population_risk(&self, w: usize) -> f64 {
        let terms: Vec<f64> = self
            .mu
            .iter()
            .zip(&self.loss[w])
            .map(|(&m, &l)| m * l)
            .collect();
        stable_sum(&terms)
    }

    /// All datasets of length n in lexicographic order, guarded.
    pub fn all_datasets(&self) -> Result<Vec<Vec<usize>>> {
        let k = self.z_atoms.len() as u128;
        let total = k.checked_pow(self.n as u32).unwrap_or(u128::MAX);
        if total > ENUMERATION_GUARD as u128 {
            return Err(Error::SizeGuard {
                datasets: total,
                limit: ENUMERATION_GUARD,
            });
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut s = vec![0usize; self.n];
        loop {
            out.push(s.clone());
            let mut i = self.n;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                s[i] += 1;
                if s[i] < self.z_atoms.len() {
                    break;
                }
                s[i] = 0;
            }
        }
    }

    /// Probability of dataset `s` under mu^n.
    pub fn dataset_prob(&self, s: &[usize]) -> f64 {
        s.iter().map(|&z| self.mu[z]).product()
    }
}

/// Gibbs posterior P(w|s) ∝ prior(w) · exp(-β L_E(w,s)), computed in log
/// space; the closed-form solution of KL-regularized ERM.
pub fn gibbs_posterior(inst: &LearnerInstance, s: &[usize]) -> ProbVec {
    let mut logits: Vec<f64> = (0..inst.w_atoms.len())
        .map(|w| inst.prior[w].ln() - inst.beta * inst.empirical_risk(w, s))
        .collect();
    let z = logsumexp(&logits);
    for l in &mut logits {
        *l = (*l - z).exp();
    }
    let total = stable_sum(&logits);
    for l in &mut logits {
        *l /= total;
    }
    ProbVec::new(inst.w_atoms.clone(), logits).expect("softmax is a distribution")
}

/// Exact excess risk of a learning kernel: E[L_mu(W)] - inf_w L_mu(w),
/// the expectation enumerating every dataset weighted by mu^n.
pub fn excess_risk_exact(
    inst: &LearnerInstance,
    kernel: &(dyn Fn(&[usize]) -> Vec<f64> + Sync),
) -> Result<f64> {
    inst.validate()?;
    let datasets = inst.all_datasets()?;
    let pop: Vec<f64> = (0..inst.w_atoms.len())
        .map(|w| inst.population_risk(w))
        .collect();
    let best = pop.iter().copied().fold(f64::INFINITY, f64::min);
    let terms: Vec<f64> = datasets
        .iter()
        .map(|s| {
            let post = kernel(s);
            let exp_risk: f64 = post.iter().zip(&pop).map(|(p, r)| p * r).sum();
            inst.dataset_prob(s) * exp_risk
        })
        .collect();
    Ok(stable_sum(&terms) - best)
}

/// Parameters of the bounded-Lipschitz excess-risk bounds.
#[derive(Debug, Clone, Copy)]
pub struct ExcessBoundParams {
    /// Loss bound b with |loss| <= b.
    pub b: f64,
    /// Lipschitz constant of the loss in the hypothesis.
    pub lip: f64,
    /// Parameter dimension.
    pub d: usize,
    pub beta: f64,
    pub n: usize,
    /// Squared norm of the population risk minimizer.
    pub w_star_norm_sq: f64,
    pub alpha: Alpha,
    /// Per-sample information values (n of them).
    pub info_sum: f64,
}

/// Which divergence regularizes the posterior whose excess risk is bounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExcessKind {
    /// α-JS posterior; divergence-to-prior term capped by h(α).
    Js,
    /// α-JS posterior with the prior term evaluated exactly by 1-D
    /// quadrature against a standard normal prior (requires d = 1).
    JsQuadrature1D,
    /// α-Rényi posterior with the Gaussian-to-Gaussian prior term in
    /// closed form against a standard normal prior.
    Renyi,
}

/// Excess-risk bound value with its three-term breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct ExcessBoundReport {
    pub bound_name: String,
    pub value: f64,
    pub information_term: f64,
    pub lipschitz_term: f64,
    pub divergence_term: f64,
}

/// Excess-risk bound for the divergence-regularized posterior:
///
///   JS:    √(2b²/(nα(1-α)) Σ I_JS^α) + L√d/β + h(α)/β
///   Rényi: √(2b²/(nα) Σ I_R^α)       + L√d/β + R_α(N(w*,β⁻¹I_d)‖N(0,I_d))/β
///
/// The Rényi prior term uses the Gaussian closed form
/// (α/2)‖w*‖²(α + (1-α)/β)⁻¹ + (d/(2(α-1))) log(β^{α-1}/(α + (1-α)/β)).
pub fn excess_risk_bound(p: &ExcessBoundParams, kind: ExcessKind) -> Result<ExcessBoundReport> {
    if p.b < 0.0 || p.lip < 0.0 || p.beta <= 0.0 || p.n == 0 || p.w_star_norm_sq < 0.0 {
        return Err(Error::Precondition("excess-risk parameters must be nonnegative".into()));
    }
    let a = p.alpha.value();
    let nf = p.n as f64;
    let lipschitz_term = p.lip * (p.d as f64).sqrt() / p.beta;
    let (name, information_term, divergence_term) = match kind {
        ExcessKind::Js => (
            "excess_js",
            (2.0 * p.b * p.b * p.info_sum / (nf * a * (1.0 - a))).sqrt(),
            binary_entropy(p.alpha) / p.beta,
        ),
        ExcessKind::JsQuadrature1D => {
            if p.d != 1 {
                return Err(Error::Precondition("quadrature prior term requires d = 1".into()));
            }
            (
                "excess_js_quadrature",
                (2.0 * p.b * p.b * p.info_sum / (nf * a * (1.0 - a))).sqrt(),
                js_gaussian_prior_term(p.w_star_norm_sq.sqrt(), p.beta, p.alpha) / p.beta,
            )
        }
        ExcessKind::Renyi => {
            let mix = a + (1.0 - a) / p.beta;
            let mean_term = 0.5 * a * p.w_star_norm_sq / mix;
            let logdet_term =
                p.d as f64 / (2.0 * (a - 1.0)) * (p.beta.powf(a - 1.0) / mix).ln();
            (
                "excess_renyi",
                (2.0 * p.b * p.b * p.info_sum / (nf * a)).sqrt(),
                (mean_term + logdet_term) / p.beta,
            )
        }
    };
    Ok(ExcessBoundReport {
        bound_name: name.into(),
        value: information_term + lipschitz_term + divergence_term,
        information_term,
        lipschitz_term,
        divergence_term,
    })
}

/// The three relaxed tail terms of the √n-temperature Rényi excess bound:
/// ‖w*‖²/(2β), (d/(2β)) log β, (d/(2β(1-α))) log α. Their sum upper-bounds
/// the exact Gaussian prior term plus the Lipschitz-free remainder.
pub fn renyi_relaxed_tail_terms(p: &ExcessBoundParams) -> [f64; 3] {
    let a = p.alpha.value();
    let d = p.d as f64;
    [
        0.5 * p.w_star_norm_sq / p.beta,
        d / (2.0 * p.beta) * p.beta.ln(),
        d / (2.0 * p.beta * (1.0 - a)) * a.ln(),
    ]
}

/// JS_α(N(m, 1/β) ‖ N(0,1)) by Gauss–Hermite quadrature of the two KL
/// integrals against the explicit two-component mixture density.
fn js_gaussian_prior_term(m: f64, beta: f64, alpha: Alpha) -> f64 {
    let a = alpha.value();
    let var_p = 1.0 / beta;
    let ln_phi = |x: f64, mean: f64, var: f64| {
        -0.5 * ((x - mean) * (x - mean) / var + var.ln() + (2.0 * std::f64::consts::PI).ln())
    };
    // m(x) = α q(x) + (1-α) p(x), q = N(0,1), p = N(m, 1/β).
    let ln_mix = |x: f64| {
        logsumexp(&[a.ln() + ln_phi(x, 0.0, 1.0), (1.0 - a).ln() + ln_phi(x, m, var_p)])
    };
    let (nodes, weights) = crate::numeric::gauss_hermite(96);
    let norm = 1.0 / std::f64::consts::PI.sqrt();
    // E_q[ln q - ln m] with q = N(mean, var): x = mean + sqrt(2 var) u.
    let kl_to_mix = |mean: f64, var: f64| {
        let s = (2.0 * var).sqrt();
        let acc: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&u, &w)| {
                let x = mean + s * u;
                w * (ln_phi(x, mean, var) - ln_mix(x))
            })
            .sum();
        acc * norm
    };
    a * kl_to_mix(0.0, 1.0) + (1.0 - a) * kl_to_mix(m, var_p)
}
