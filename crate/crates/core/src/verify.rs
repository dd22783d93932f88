//! Seeded verification suites: decomposition identities, information
//! inequalities and bound-soundness fuzzing against the exact oracle.
//!
//! Every case derives its randomness from `(seed, case index)`, so reports
//! are byte-identical across runs and thread counts. A violation carries
//! the full offending instance.

use crate::bounds::{
    envelope_pair_bound, gen_bound, BoundKind, CgfEnvelope, SubGaussianParams,
};
use crate::measures::{
    binary_entropy, info_measure, js_mixture_decomposition, renyi_geometric_decomposition, Alpha,
    InfoKind, JointDist,
};
use crate::numeric::{derive_seed, random_simplex, stream_rng};
use crate::oracle::{dataset_index, enumerate_learner, random_joint, random_learner_instance};
use crate::Result;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const IDENTITY_TOL: f64 = 1e-9;

/// Full instance attached to a failed check.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub case: u64,
    pub check: String,
    pub alpha: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// Row-major joint mass, rows = hypotheses.
    pub joint: Vec<Vec<f64>>,
    pub aux: Option<Vec<Vec<f64>>>,
}

/// Outcome of one named check across all cases.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub evaluations: u64,
    pub violations: u64,
    /// Largest residual (identities) or violation margin (inequalities).
    pub worst: f64,
    pub counterexample: Option<Counterexample>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        CheckReport {
            name: name.into(),
            evaluations: 0,
            violations: 0,
            worst: f64::NEG_INFINITY,
            counterexample: None,
        }
    }

    fn record(&mut self, value: f64, violated: bool, ce: impl FnOnce() -> Counterexample) {
        self.evaluations += 1;
        if value > self.worst {
            self.worst = value;
        }
        if violated {
            self.violations += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(ce());
            }
        }
    }

    fn merge(&mut self, other: CheckReport) {
        self.evaluations += other.evaluations;
        self.violations += other.violations;
        if other.worst > self.worst {
            self.worst = other.worst;
        }
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
    }

    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: u64,
    pub pass: bool,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    fn from_checks(name: &str, cases: u64, checks: Vec<CheckReport>) -> Self {
        let pass = checks.iter().all(CheckReport::pass);
        SuiteReport {
            name: name.into(),
            cases,
            pass,
            checks,
        }
    }
}

fn joint_rows(j: &JointDist) -> Vec<Vec<f64>> {
    (0..j.n_w())
        .map(|w| (0..j.n_z()).map(|z| j.get(w, z)).collect())
        .collect()
}

fn random_case_joint(seed: u64, case: u64) -> JointDist {
    let mut rng = stream_rng(seed, case);
    let nw = rng.gen_range(2..=4usize);
    let nz = rng.gen_range(2..=4usize);
    random_joint(derive_seed(seed, case), nw, nz)
}

/// Both decomposition identities on seeded random (joint, auxiliary, α)
/// triples, at relative tolerance 1e-9.
pub fn identity_suite(cases: u64, seed: u64) -> Result<SuiteReport> {
    let per_case: Vec<(CheckReport, CheckReport)> = (0..cases)
        .into_par_iter()
        .map(|case| {
            let mut js = CheckReport::new("js_mixture_identity");
            let mut renyi = CheckReport::new("renyi_geometric_identity");
            let j = random_case_joint(seed, case);
            let mut rng = stream_rng(seed, case ^ 0x5eed);
            let aux_mass = random_simplex(&mut rng, j.n_w() * j.n_z());
            let aux =
                JointDist::new(j.w_atoms().to_vec(), j.z_atoms().to_vec(), aux_mass).unwrap();
            let a = Alpha::new(0.05 + 0.9 * rng.gen::<f64>()).unwrap();

            let (lhs, residual) = js_mixture_decomposition(&j, &aux, a).unwrap();
            let ijs = info_measure(&j, InfoKind::Js(a)).unwrap();
            let rel = (lhs - (ijs + residual)).abs() / lhs.abs().max(1.0);
            js.record(rel, rel > IDENTITY_TOL, || Counterexample {
                case,
                check: "js_mixture_identity".into(),
                alpha: Some(a.value()),
                lhs,
                rhs: ijs + residual,
                joint: joint_rows(&j),
                aux: Some(joint_rows(&aux)),
            });

            let (lhs, residual) = renyi_geometric_decomposition(&j, &aux, a).unwrap();
            let ir = info_measure(&j, InfoKind::Renyi(a)).unwrap();
            let rhs = (1.0 - a.value()) * ir + residual;
            let rel = (lhs - rhs).abs() / lhs.abs().max(1.0);
            renyi.record(rel, rel > IDENTITY_TOL, || Counterexample {
                case,
                check: "renyi_geometric_identity".into(),
                alpha: Some(a.value()),
                lhs,
                rhs,
                joint: joint_rows(&j),
                aux: Some(joint_rows(&aux)),
            });
            (js, renyi)
        })
        .collect();

    let mut js = CheckReport::new("js_mixture_identity");
    let mut renyi = CheckReport::new("renyi_geometric_identity");
    for (a, b) in per_case {
        js.merge(a);
        renyi.merge(b);
    }
    Ok(SuiteReport::from_checks("identities", cases, vec![js, renyi]))
}

const ALPHA_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Information inequalities over random joints × the α grid:
/// I_JS^α ≤ (1-α)·I, I_R^α ≤ min{1, α/(1-α)}·I, I_JS^α ≤ h(α), and
/// Sibson ≤ Rényi.
pub fn inequality_suite(cases: u64, seed: u64) -> Result<SuiteReport> {
    let names = ["js_le_scaled_mi", "renyi_le_min_scaled_mi", "js_le_binary_entropy", "sibson_le_renyi"];
    let per_case: Vec<Vec<CheckReport>> = (0..cases)
        .into_par_iter()
        .map(|case| {
            let mut checks: Vec<CheckReport> = names.iter().map(|n| CheckReport::new(n)).collect();
            let j = random_case_joint(seed, case);
            let mi = info_measure(&j, InfoKind::Mi).unwrap();
            for a in ALPHA_GRID {
                let alpha = Alpha::new(a).unwrap();
                let tol = 1e-9;
                let ijs = info_measure(&j, InfoKind::Js(alpha)).unwrap();
                let ir = info_measure(&j, InfoKind::Renyi(alpha)).unwrap();
                let is = info_measure(&j, InfoKind::Sibson(alpha)).unwrap();

                if mi.is_finite() {
                    let rhs = (1.0 - a) * mi;
                    checks[0].record(ijs - rhs, ijs > rhs + tol * rhs.max(1.0), || {
                        Counterexample {
                            case,
                            check: names[0].into(),
                            alpha: Some(a),
                            lhs: ijs,
                            rhs,
                            joint: joint_rows(&j),
                            aux: None,
                        }
                    });
                    let rhs = (a / (1.0 - a)).min(1.0) * mi;
                    checks[1].record(ir - rhs, ir > rhs + tol * rhs.max(1.0), || {
                        Counterexample {
                            case,
                            check: names[1].into(),
                            alpha: Some(a),
                            lhs: ir,
                            rhs,
                            joint: joint_rows(&j),
                            aux: None,
                        }
                    });
                }
                let cap = binary_entropy(alpha);
                checks[2].record(ijs - cap, ijs > cap + tol, || Counterexample {
                    case,
                    check: names[2].into(),
                    alpha: Some(a),
                    lhs: ijs,
                    rhs: cap,
                    joint: joint_rows(&j),
                    aux: None,
                });
                checks[3].record(is - ir, is > ir + tol * ir.max(1.0), || Counterexample {
                    case,
                    check: names[3].into(),
                    alpha: Some(a),
                    lhs: is,
                    rhs: ir,
                    joint: joint_rows(&j),
                    aux: None,
                });
            }
            checks
        })
        .collect();

    let mut checks: Vec<CheckReport> = names.iter().map(|n| CheckReport::new(n)).collect();
    for case_checks in per_case {
        for (acc, c) in checks.iter_mut().zip(case_checks) {
            acc.merge(c);
        }
    }
    Ok(SuiteReport::from_checks("inequalities", cases, checks))
}

/// Bound-soundness fuzz: on seeded random enumerable instances with losses
/// in [0,1] and σ = 1/2, every implemented bound must dominate the exact
/// generalization error; the two exact-gen routes must agree to 1e-12 and
/// the decomposition identities must hold on each per-sample joint with a
/// random auxiliary.
pub fn soundness_suite(cases: u64, seed: u64) -> Result<SuiteReport> {
    let names = [
        "bound_dominates_gen",
        "gen_routes_agree",
        "per_sample_identities",
    ];
    let alphas: Vec<Alpha> = [0.1, 0.3, 0.5, 0.7, 0.9]
        .iter()
        .map(|&a| Alpha::new(a).unwrap())
        .collect();
    let per_case: Vec<Vec<CheckReport>> = (0..cases)
        .into_par_iter()
        .map(|case| {
            let mut checks: Vec<CheckReport> = names.iter().map(|n| CheckReport::new(n)).collect();
            let (inst, table) = random_learner_instance(derive_seed(seed, case));
            let nz = inst.z_atoms.len();
            let kernel = move |s: &[usize]| table[dataset_index(s, nz)].clone();
            let e = enumerate_learner(&inst, &kernel).unwrap();
            let gen_abs = e.exact_gen.abs();
            let sg = SubGaussianParams::from_loss_range(0.0, 1.0).unwrap();
            let tol = 1e-9;

            let check_bound = |name: String, value: f64, alpha: Option<f64>, checks: &mut Vec<CheckReport>| {
                checks[0].record(gen_abs - value, value + tol < gen_abs, || Counterexample {
                    case,
                    check: format!("bound_dominates_gen/{name}"),
                    alpha,
                    lhs: gen_abs,
                    rhs: value,
                    joint: joint_rows(&e.per_sample_joints[0]),
                    aux: None,
                });
            };

            let info_of = |kind: fn(Alpha) -> InfoKind, a: Alpha| -> Vec<f64> {
                e.per_sample_joints
                    .iter()
                    .map(|j| info_measure(j, kind(a)).unwrap())
                    .collect()
            };
            let plain_info = |kind: InfoKind| -> Vec<f64> {
                e.per_sample_joints
                    .iter()
                    .map(|j| info_measure(j, kind).unwrap())
                    .collect()
            };

            let mi = plain_info(InfoKind::Mi);
            let lautum = plain_info(InfoKind::Lautum);
            check_bound(
                "mi".into(),
                gen_bound(&mi, BoundKind::Mi, &sg).unwrap().value,
                None,
                &mut checks,
            );
            check_bound(
                "lautum".into(),
                gen_bound(&lautum, BoundKind::Lautum, &sg).unwrap().value,
                None,
                &mut checks,
            );
            for &a in &alphas {
                let js = info_of(InfoKind::Js, a);
                let renyi = info_of(InfoKind::Renyi, a);
                let sibson = info_of(InfoKind::Sibson, a);
                for (kind, info) in [
                    (BoundKind::Js(a), &js),
                    (BoundKind::Renyi(a), &renyi),
                    (BoundKind::Sibson(a), &sibson),
                    (BoundKind::PinskerRenyi(a), &renyi),
                ] {
                    let b = gen_bound(info, kind, &sg).unwrap();
                    check_bound(b.bound_name.clone(), b.value, Some(a.value()), &mut checks);
                }
            }

            // General two-envelope route with a random full-support
            // auxiliary per sample.
            let mut rng = stream_rng(seed, case ^ (0xa_u64 << 32));
            let env = CgfEnvelope::quadratic(0.5);
            let mut a_list = Vec::new();
            let mut b_list = Vec::new();
            for (i, j) in e.per_sample_joints.iter().enumerate() {
                let aux_mass = random_simplex(&mut rng, j.n_w() * j.n_z());
                let aux = JointDist::new(j.w_atoms().to_vec(), j.z_atoms().to_vec(), aux_mass)
                    .unwrap();
                let prod = j.product_of_marginals();
                a_list.push(crate::measures::kl(&prod.flatten(), &aux.flatten()).unwrap());
                b_list.push(crate::measures::kl(&j.flatten(), &aux.flatten()).unwrap());

                // Identities on this per-sample joint with the same auxiliary.
                let a = Alpha::new(0.05 + 0.9 * rng.gen::<f64>()).unwrap();
                let (lhs, residual) = js_mixture_decomposition(j, &aux, a).unwrap();
                let ijs = info_measure(j, InfoKind::Js(a)).unwrap();
                let rel_js = (lhs - (ijs + residual)).abs() / lhs.abs().max(1.0);
                let (lhs_r, residual_r) = renyi_geometric_decomposition(j, &aux, a).unwrap();
                let ir = info_measure(j, InfoKind::Renyi(a)).unwrap();
                let rel_r =
                    (lhs_r - ((1.0 - a.value()) * ir + residual_r)).abs() / lhs_r.abs().max(1.0);
                let rel = rel_js.max(rel_r);
                checks[2].record(rel, rel > IDENTITY_TOL, || Counterexample {
                    case,
                    check: format!("per_sample_identities/sample{i}"),
                    alpha: Some(a.value()),
                    lhs,
                    rhs: ijs + residual,
                    joint: joint_rows(j),
                    aux: Some(joint_rows(&aux)),
                });
            }
            // The pair (upper, lower) certifies gen <= upper and
            // -gen <= lower; together they cover |gen|.
            let (upper, lower) = envelope_pair_bound(&a_list, &b_list, &env, &env).unwrap();
            checks[0].record(e.exact_gen - upper, e.exact_gen > upper + 1e-9, || {
                Counterexample {
                    case,
                    check: "bound_dominates_gen/general_random_aux_upper".into(),
                    alpha: None,
                    lhs: e.exact_gen,
                    rhs: upper,
                    joint: joint_rows(&e.per_sample_joints[0]),
                    aux: None,
                }
            });
            checks[0].record(
                (-e.exact_gen) - lower,
                -e.exact_gen > lower + 1e-9,
                || Counterexample {
                    case,
                    check: "bound_dominates_gen/general_random_aux_lower".into(),
                    alpha: None,
                    lhs: -e.exact_gen,
                    rhs: lower,
                    joint: joint_rows(&e.per_sample_joints[0]),
                    aux: None,
                },
            );

            let route_gap = (e.exact_gen - e.exact_gen_per_sample).abs();
            checks[1].record(route_gap, route_gap > 1e-12, || Counterexample {
                case,
                check: "gen_routes_agree".into(),
                alpha: None,
                lhs: e.exact_gen,
                rhs: e.exact_gen_per_sample,
                joint: joint_rows(&e.per_sample_joints[0]),
                aux: None,
            });
            checks
        })
        .collect();

    let mut checks: Vec<CheckReport> = names.iter().map(|n| CheckReport::new(n)).collect();
    for case_checks in per_case {
        for (acc, c) in checks.iter_mut().zip(case_checks) {
            acc.merge(c);
        }
    }
    Ok(SuiteReport::from_checks("soundness", cases, checks))
}

/// Aggregate verification report for the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema: String,
    pub seed: u64,
    pub cases: u64,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

/// Runs all three suites with `cases` cases each.
pub fn run_all(cases: u64, seed: u64) -> Result<VerifyReport> {
    let suites = vec![
        identity_suite(cases, derive_seed(seed, 1))?,
        inequality_suite(cases, derive_seed(seed, 2))?,
        soundness_suite(cases, derive_seed(seed, 3))?,
    ];
    let pass = suites.iter().all(|s| s.pass);
    Ok(VerifyReport {
        schema: "genbound-verify-1".into(),
        seed,
        cases,
        pass,
        suites,
    })
}
