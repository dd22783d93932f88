//! Independent ground truth: exhaustive enumeration of small learner
//! instances, Monte Carlo divergence estimators, finite-difference gradient
//! checks and deterministic instance generators for fuzzing.
//!
//! Nothing here routes through the closed forms it is used to check.

pub(crate) mod mc;

pub use mc::{mc_divergence, Gaussian1, Gaussian2, McDist, McKind};

use crate::erm::LearnerInstance;
use crate::error::Error;
use crate::measures::{JointDist, ProbVec};
use crate::numeric::{binomial_pmf, random_simplex, stable_sum, stream_rng};
use crate::Result;
use rand::Rng;

/// Exact description of a learner: per-sample joints, hypothesis marginal
/// and the expected generalization error computed two independent ways.
#[derive(Debug, Clone)]
pub struct EnumeratedLearner {
    pub per_sample_joints: Vec<JointDist>,
    pub w_marginal: ProbVec,
    /// Direct double sum over datasets of L_mu(w) - L_E(w,s).
    pub exact_gen: f64,
    /// Per-sample route (1/n) Σ_i (E_{P_W⊗μ}[ℓ] - E_{P_{W,Z_i}}[ℓ]).
    pub exact_gen_per_sample: f64,
}

/// Enumerates every dataset of `inst` under the kernel and assembles the
/// exact per-sample joints P_{W,Z_i} together with the generalization error.
/// The two computation routes agree to 1e-12 on valid inputs.
pub fn enumerate_learner(
    inst: &LearnerInstance,
    kernel: &(dyn Fn(&[usize]) -> Vec<f64> + Sync),
) -> Result<EnumeratedLearner> {
    inst.validate()?;
    let datasets = inst.all_datasets()?;
    let nw = inst.w_atoms.len();
    let nz = inst.z_atoms.len();
    let n = inst.n;

    let mut joint_terms: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); nw * nz]; n];
    let mut w_terms: Vec<Vec<f64>> = vec![Vec::new(); nw];
    let mut direct_terms = Vec::with_capacity(datasets.len());

    for s in &datasets {
        let ps = inst.dataset_prob(s);
        let post = kernel(s);
        debug_assert_eq!(post.len(), nw);
        for w in 0..nw {
            let mass = ps * post[w];
            w_terms[w].push(mass);
            for (i, &z) in s.iter().enumerate() {
                joint_terms[i][w * nz + z].push(mass);
            }
            direct_terms.push(mass * (inst.population_risk(w) - inst.empirical_risk(w, s)));
        }
    }

    let w_mass: Vec<f64> = w_terms.iter().map(|t| stable_sum(t)).collect();
    let w_total = stable_sum(&w_mass);
    let w_marginal = ProbVec::new(
        inst.w_atoms.clone(),
        w_mass.iter().map(|m| m / w_total).collect(),
    )?;

    let mut per_sample_joints = Vec::with_capacity(n);
    for cells in &joint_terms {
        let mut mass: Vec<f64> = cells.iter().map(|t| stable_sum(t)).collect();
        let total = stable_sum(&mass);
        for m in &mut mass {
            *m /= total;
        }
        per_sample_joints.push(JointDist::new(
            inst.w_atoms.clone(),
            inst.z_atoms.clone(),
            mass,
        )?);
    }

    let exact_gen = stable_sum(&direct_terms);

    // Independent route through the per-sample joints.
    let mut per_sample = Vec::with_capacity(n);
    for j in &per_sample_joints {
        let prod = j.product_of_marginals();
        let mut gap = Vec::with_capacity(nw * nz);
        for w in 0..nw {
            for z in 0..nz {
                gap.push((prod.get(w, z) - j.get(w, z)) * inst.loss[w][z]);
            }
        }
        per_sample.push(stable_sum(&gap));
    }
    let exact_gen_per_sample = stable_sum(&per_sample) / n as f64;

    Ok(EnumeratedLearner {
        per_sample_joints,
        w_marginal,
        exact_gen,
        exact_gen_per_sample,
    })
}

/// Lexicographic index of dataset `s` over an alphabet of size `nz`.
pub fn dataset_index(s: &[usize], nz: usize) -> usize {
    s.iter().fold(0, |acc, &z| acc * nz + z)
}

/// Seeded random enumerable instance plus a strictly positive random
/// stochastic kernel, tabulated per dataset in lexicographic order.
pub fn random_learner_instance(seed: u64) -> (LearnerInstance, Vec<Vec<f64>>) {
    let mut rng = stream_rng(seed, 0);
    let nw = rng.gen_range(2..=4usize);
    let nz = rng.gen_range(2..=4usize);
    let n = rng.gen_range(1..=3usize);
    let mu = random_simplex(&mut rng, nz);
    let prior = random_simplex(&mut rng, nw);
    let loss: Vec<Vec<f64>> = (0..nw)
        .map(|_| (0..nz).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let inst = LearnerInstance {
        z_atoms: (0..nz).map(|i| format!("z{i}")).collect(),
        mu,
        w_atoms: (0..nw).map(|i| format!("w{i}")).collect(),
        loss,
        n,
        beta: 1.0,
        prior,
    };
    let kernel: Vec<Vec<f64>> = (0..nz.pow(n as u32))
        .map(|_| random_simplex(&mut rng, nw))
        .collect();
    (inst, kernel)
}

/// Seeded random full-support joint distribution.
pub fn random_joint(seed: u64, nw: usize, nz: usize) -> JointDist {
    let mut rng = stream_rng(seed, 1);
    let mass = random_simplex(&mut rng, nw * nz);
    JointDist::new(
        (0..nw).map(|i| format!("w{i}")).collect(),
        (0..nz).map(|i| format!("z{i}")).collect(),
        mass,
    )
    .expect("simplex point is a joint")
}

/// Exact per-sample joint P_{W,Z_i} of a Gibbs learner on Bernoulli(p) data.
///
/// With a binary sample alphabet the empirical risk depends on the dataset
/// only through the count of ones, so the posterior averages over a
/// Binomial(n-1, p) sufficient statistic; exact in O(n·|W|) per sample and
/// identical for every i by exchangeability.
pub fn gibbs_bernoulli_joint(
    loss0: &[f64],
    loss1: &[f64],
    prior: &[f64],
    beta: f64,
    p: f64,
    n: usize,
) -> JointDist {
    assert_eq!(loss0.len(), loss1.len());
    assert_eq!(loss0.len(), prior.len());
    assert!(n >= 1);
    let nw = prior.len();
    let posterior_at = |k: usize| -> Vec<f64> {
        let logits: Vec<f64> = (0..nw)
            .map(|w| {
                let emp = (k as f64 * loss1[w] + (n - k) as f64 * loss0[w]) / n as f64;
                prior[w].ln() - beta * emp
            })
            .collect();
        let z = crate::numeric::logsumexp(&logits);
        logits.iter().map(|l| (l - z).exp()).collect()
    };
    // P(w, z) = mu(z) Σ_{k'} Bin(n-1, p)(k') posterior(k' + z)(w).
    let mut mass = vec![0.0f64; nw * 2];
    for z in 0..2usize {
        let muz = if z == 1 { p } else { 1.0 - p };
        for kp in 0..n {
            let weight = binomial_pmf(n - 1, kp, p);
            let post = posterior_at(kp + z);
            for w in 0..nw {
                mass[w * 2 + z] += muz * weight * post[w];
            }
        }
    }
    let total = stable_sum(&mass);
    for m in &mut mass {
        *m /= total;
    }
    JointDist::new(
        (0..nw).map(|i| format!("w{i}")).collect(),
        vec!["0".into(), "1".into()],
        mass,
    )
    .expect("normalized mass is a joint")
}

/// Objective value paired with its analytic gradient.
pub type Gradient = (f64, Vec<f64>);

/// Max relative deviation between an analytic gradient and central finite
/// differences: max_i |g_i - fd_i| / (1 + |g_i|).
///
/// `objective` returns the value and its gradient at a point. The point
/// must keep every coordinate at least `2·step` from zero so both shifted
/// evaluations stay in domain.
pub fn finite_diff_grad_check(
    objective: &dyn Fn(&[f64]) -> Gradient,
    point: &[f64],
    step: f64,
) -> Result<f64> {
    if !(1e-8..=1e-4).contains(&step) {
        return Err(Error::Precondition(format!("step {step} outside [1e-8, 1e-4]")));
    }
    if point.iter().any(|&x| x < 2.0 * step) {
        return Err(Error::Domain("point too near the boundary for central differences".into()));
    }
    let (_, grad) = objective(point);
    let mut worst = 0.0f64;
    for i in 0..point.len() {
        let mut hi = point.to_vec();
        let mut lo = point.to_vec();
        hi[i] += step;
        lo[i] -= step;
        let fd = (objective(&hi).0 - objective(&lo).0) / (2.0 * step);
        worst = worst.max((grad[i] - fd).abs() / (1.0 + grad[i].abs()));
    }
    Ok(worst)
}

/// Brute-force minimization over the 2-simplex: coarse grid at `step`, then
/// two rounds of local refinement. Returns the best point and value.
pub fn grid_min_simplex3(objective: &(dyn Fn(&[f64]) -> f64 + Sync), step: f64) -> (Vec<f64>, f64) {
    use rayon::prelude::*;
    let steps = (1.0 / step).round() as usize;
    let scan = |x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64, k: usize| {
        (0..=k)
            .into_par_iter()
            .map(|i| {
                let x = x_lo + (x_hi - x_lo) * i as f64 / k as f64;
                let mut local_best = (vec![], f64::INFINITY);
                for j in 0..=k {
                    let y = y_lo + (y_hi - y_lo) * j as f64 / k as f64;
                    if x < 0.0 || y < 0.0 || x + y > 1.0 {
                        continue;
                    }
                    let p = vec![x, y, 1.0 - x - y];
                    let v = objective(&p);
                    if v < local_best.1 {
                        local_best = (p, v);
                    }
                }
                local_best
            })
            .reduce(
                || (vec![], f64::INFINITY),
                |a, b| if a.1 <= b.1 { a } else { b },
            )
    };
    let (mut best_p, mut best_v) = scan(0.0, 1.0, 0.0, 1.0, steps);
    let mut width = step;
    for _ in 0..2 {
        let (x, y) = (best_p[0], best_p[1]);
        let (p, v) = scan(
            (x - 2.0 * width).max(0.0),
            (x + 2.0 * width).min(1.0),
            (y - 2.0 * width).max(0.0),
            (y + 2.0 * width).min(1.0),
            200,
        );
        if v < best_v {
            best_p = p;
            best_v = v;
        }
        width /= 100.0;
    }
    (best_p, best_v)
}
