//! Expected-generalization-error bound evaluators.
//!
//! The general engine converts per-sample KL values into expectation gaps
//! through inverse Legendre duals of CGF envelopes
//! ([`envelope_pair_bound`]); the named bounds specialize it to the
//! sub-Gaussian case where the duals collapse to square roots.

mod envelope;

pub use envelope::{inverse_legendre_dual, CgfEnvelope};

use crate::error::Error;
use crate::measures::{binary_entropy, Alpha};
use crate::Result;
use serde::Serialize;

/// Sub-Gaussian proxy parameters for a loss function.
///
/// `sigma` applies under the product law, `gamma` under the joint,
/// `sigma_alpha` under the α-mixture. A bounded loss on [a,b] is
/// (b-a)/2-sub-Gaussian under every distribution, so `from_loss_range` sets
/// all three to that common value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SubGaussianParams {
    pub sigma: Option<f64>,
    pub gamma: Option<f64>,
    pub sigma_alpha: Option<f64>,
    pub loss_range: Option<(f64, f64)>,
}

impl SubGaussianParams {
    pub fn from_loss_range(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
            return Err(Error::Precondition(format!("bad loss range [{lo}, {hi}]")));
        }
        let s = (hi - lo) / 2.0;
        Ok(SubGaussianParams {
            sigma: Some(s),
            gamma: Some(s),
            sigma_alpha: Some(s),
            loss_range: Some((lo, hi)),
        })
    }

    pub fn with_sigmas(sigma: f64, gamma: f64, sigma_alpha: f64) -> Self {
        SubGaussianParams {
            sigma: Some(sigma),
            gamma: Some(gamma),
            sigma_alpha: Some(sigma_alpha),
            loss_range: None,
        }
    }

    fn sigma(&self) -> Result<f64> {
        self.sigma.ok_or(Error::MissingParameter("sigma"))
    }

    fn gamma(&self) -> Result<f64> {
        self.gamma.ok_or(Error::MissingParameter("gamma"))
    }

    fn sigma_alpha(&self) -> Result<f64> {
        self.sigma_alpha.ok_or(Error::MissingParameter("sigma_alpha"))
    }

    /// sup |loss|, required by the Pinsker-route bound.
    fn loss_sup(&self) -> Result<f64> {
        let (lo, hi) = self.loss_range.ok_or(Error::MissingParameter("loss_range"))?;
        Ok(lo.abs().max(hi.abs()))
    }
}

/// Which information measure drives a generalization bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundKind {
    Mi,
    Lautum,
    Js(Alpha),
    Renyi(Alpha),
    Sibson(Alpha),
    /// Bounded-loss route through the generalized Pinsker inequality.
    PinskerRenyi(Alpha),
}

impl BoundKind {
    pub fn label(&self) -> String {
        match self {
            BoundKind::Mi => "mi".into(),
            BoundKind::Lautum => "lautum".into(),
            BoundKind::Js(a) => format!("js_{:.2}", a.value()),
            BoundKind::Renyi(a) => format!("renyi_{:.2}", a.value()),
            BoundKind::Sibson(a) => format!("sibson_{:.2}", a.value()),
            BoundKind::PinskerRenyi(a) => format!("pinsker_renyi_{:.2}", a.value()),
        }
    }
}

/// A named bound value with the inputs that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub value: f64,
    pub alpha: Option<f64>,
    pub params: SubGaussianParams,
    pub n: usize,
    pub info: Vec<f64>,
}

impl BoundReport {
    fn new(name: String, value: f64, alpha: Option<f64>, sg: SubGaussianParams, info: &[f64]) -> Self {
        debug_assert!(value >= 0.0 || value.is_nan());
        BoundReport {
            bound_name: name,
            value,
            alpha,
            params: sg,
            n: info.len(),
            info: info.to_vec(),
        }
    }
}

/// General two-envelope bound: given per-sample KL values `a` and `b` and a
/// pair of CGF envelopes, returns
///
///   upper = (1/n) Σ [ψ₊*⁻¹(a_i) + ψ₋*⁻¹(b_i)]
///   lower = (1/n) Σ [ψ₋*⁻¹(a_i) + ψ₊*⁻¹(b_i)]
///
/// `upper` bounds the expected generalization error and `lower` bounds its
/// negation. The evaluator is direction-agnostic: with an auxiliary joint
/// P̂ it is wired as a_i = KL(P_W⊗μ ‖ P̂), b_i = KL(P_{W,Z_i} ‖ P̂); the
/// reversed wiring a_i = KL(P̂ ‖ P_W⊗μ), b_i = KL(P̂ ‖ P_{W,Z_i}) evaluates
/// the reverse-direction bound with the corresponding envelope pair.
/// Choosing P̂ equal to the product (a_i = 0) or the joint (b_i = 0)
/// reproduces the mutual-information and Lautum-information bounds.
pub fn envelope_pair_bound(
    a: &[f64],
    b: &[f64],
    env_plus: &CgfEnvelope,
    env_minus: &CgfEnvelope,
) -> Result<(f64, f64)> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Precondition(format!(
            "need equal nonempty KL lists, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|&x| x < 0.0 || x.is_nan()) {
        return Err(Error::Precondition("KL values must be nonnegative".into()));
    }
    let n = a.len() as f64;
    let mut upper = 0.0;
    let mut lower = 0.0;
    for (&ai, &bi) in a.iter().zip(b) {
        upper += inverse_legendre_dual(env_plus, ai) + inverse_legendre_dual(env_minus, bi);
        lower += inverse_legendre_dual(env_minus, ai) + inverse_legendre_dual(env_plus, bi);
    }
    Ok((upper / n, lower / n))
}

/// Named per-sample information bound.
///
/// With per-sample information values I_i the evaluated formulas are
///
/// - MI:      (1/n) Σ √(2σ² I_i)
/// - Lautum:  (1/n) Σ √(2γ² I_i)
/// - JS(α):   (1/n) Σ √(2σ_(α)² I_i / (α(1-α)))
/// - Rényi(α), Sibson(α): (1/n) Σ √(2(ασ² + (1-α)γ²) I_i / α)
/// - Pinsker-Rényi(α): (1/n) Σ √(2b² I_i / α) for |loss| ≤ b
///
/// `+inf` information values (possible for MI and Lautum only) propagate to
/// a `+inf` bound rather than failing.
pub fn gen_bound(info: &[f64], kind: BoundKind, sg: &SubGaussianParams) -> Result<BoundReport> {
    if info.is_empty() {
        return Err(Error::Precondition("empty information list".into()));
    }
    if info.iter().any(|&x| x < 0.0 || x.is_nan()) {
        return Err(Error::Precondition("information values must be nonnegative".into()));
    }
    let n = info.len() as f64;
    let (coeff, alpha) = per_sample_coefficient(kind, sg)?;
    let total: f64 = info.iter().map(|&i| (coeff * i).sqrt()).sum();
    Ok(BoundReport::new(kind.label(), total / n, alpha, *sg, info))
}

/// The factor c in per-sample term √(c · I_i) for each bound kind.
fn per_sample_coefficient(kind: BoundKind, sg: &SubGaussianParams) -> Result<(f64, Option<f64>)> {
    Ok(match kind {
        BoundKind::Mi => {
            let s = sg.sigma()?;
            (2.0 * s * s, None)
        }
        BoundKind::Lautum => {
            let g = sg.gamma()?;
            (2.0 * g * g, None)
        }
        BoundKind::Js(a) => {
            let s = sg.sigma_alpha()?;
            let av = a.value();
            (2.0 * s * s / (av * (1.0 - av)), Some(av))
        }
        BoundKind::Renyi(a) | BoundKind::Sibson(a) => {
            let s = sg.sigma()?;
            let g = sg.gamma()?;
            let av = a.value();
            (2.0 * (av * s * s + (1.0 - av) * g * g) / av, Some(av))
        }
        BoundKind::PinskerRenyi(a) => {
            let b = sg.loss_sup()?;
            let av = a.value();
            (2.0 * b * b / av, Some(av))
        }
    })
}

/// Data-free constant bound σ_(α) √(2 h(α)/(α(1-α))), the supremum of the
/// α-JS bound over all data; minimized over α at α = 1/2 where it equals
/// 2σ_(1/2) √(2 log 2).
pub fn js_constant_bound(sg: &SubGaussianParams, a: Alpha) -> Result<BoundReport> {
    let s = sg.sigma_alpha()?;
    let av = a.value();
    let value = s * (2.0 * binary_entropy(a) / (av * (1.0 - av))).sqrt();
    Ok(BoundReport {
        bound_name: format!("js_constant_{:.2}", av),
        value,
        alpha: Some(av),
        params: *sg,
        n: 0,
        info: vec![],
    })
}

/// Sufficient condition for the α'-JS bound to be tighter than the α-Rényi
/// bound: per sample, α h(α')/(α'(1-α')) ≤ I_R^α(W;Z_i), under a common
/// sub-Gaussian parameter σ_(α') = σ = γ.
///
/// Returns the per-sample condition flags and the threshold value.
pub fn tightness_comparison(
    a_js: Alpha,
    a_renyi: Alpha,
    renyi_info: &[f64],
    sg: &SubGaussianParams,
) -> Result<(Vec<bool>, f64)> {
    let s = sg.sigma()?;
    let g = sg.gamma()?;
    let sa = sg.sigma_alpha()?;
    if (s - g).abs() > 1e-12 || (s - sa).abs() > 1e-12 {
        return Err(Error::Precondition(
            "comparison requires sigma = gamma = sigma_alpha (bounded loss)".into(),
        ));
    }
    let ap = a_js.value();
    let threshold = a_renyi.value() * binary_entropy(a_js) / (ap * (1.0 - ap));
    let flags = renyi_info.iter().map(|&i| threshold <= i).collect();
    Ok((flags, threshold))
}

/// Which divergence captures a train/test distribution shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MismatchKind {
    Js(Alpha),
    Renyi(Alpha),
}

/// Generalization bound under distribution mismatch: the matched-kind
/// in-distribution bound plus a single additive term in the divergence
/// between test and training laws,
///
/// - JS(α):    √(2σ_(α)² JS_α(μ'‖μ)/(α(1-α)))
/// - Rényi(α): √(2(ασ² + (1-α)γ²) R_α(μ'‖μ)/α)
///
/// `train_test_div` is the caller-computed divergence value.
pub fn mismatch_bound(
    train_test_div: f64,
    info: &[f64],
    kind: MismatchKind,
    sg: &SubGaussianParams,
) -> Result<BoundReport> {
    if train_test_div < 0.0 || train_test_div.is_nan() {
        return Err(Error::Precondition("divergence must be nonnegative".into()));
    }
    let (gen_kind, label) = match kind {
        MismatchKind::Js(a) => (BoundKind::Js(a), format!("mismatch_js_{:.2}", a.value())),
        MismatchKind::Renyi(a) => (BoundKind::Renyi(a), format!("mismatch_renyi_{:.2}", a.value())),
    };
    let base = gen_bound(info, gen_kind, sg)?;
    let (coeff, alpha) = per_sample_coefficient(gen_kind, sg)?;
    let shift = (coeff * train_test_div).sqrt();
    Ok(BoundReport {
        bound_name: label,
        value: base.value + shift,
        alpha,
        params: *sg,
        n: info.len(),
        info: info.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{info_measure, InfoKind, JointDist};
    use approx::assert_relative_eq;

    fn alpha(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    fn half_params() -> SubGaussianParams {
        SubGaussianParams::from_loss_range(0.0, 1.0).unwrap()
    }

    #[test]
    fn general_bound_zero_inputs() {
        let env = CgfEnvelope::quadratic(1.0);
        let (u, l) = envelope_pair_bound(&[0.0, 0.0], &[0.0, 0.0], &env, &env).unwrap();
        assert_eq!((u, l), (0.0, 0.0));
    }

    #[test]
    fn general_bound_recovers_mutual_information_formula() {
        // Auxiliary = product wiring: one KL list is zero, the other carries
        // I(W;Z_i); with quadratic envelopes the bound is (1/n) Σ √(2 I_i).
        let env = CgfEnvelope::quadratic(1.0);
        let info = [0.3, 0.7, 0.05];
        let zeros = [0.0; 3];
        let (u, l) = envelope_pair_bound(&info, &zeros, &env, &env).unwrap();
        let direct: f64 = info.iter().map(|i| (2.0 * i).sqrt()).sum::<f64>() / 3.0;
        assert_relative_eq!(u, direct, max_relative = 1e-6);
        assert_relative_eq!(l, direct, max_relative = 1e-6);

        // Lautum wiring: the roles of the two lists swap.
        let (u2, _) = envelope_pair_bound(&zeros, &info, &env, &env).unwrap();
        assert_relative_eq!(u2, direct, max_relative = 1e-6);
    }

    #[test]
    fn general_bound_propagates_infinity() {
        let env = CgfEnvelope::quadratic(0.5);
        let (u, l) = envelope_pair_bound(&[f64::INFINITY], &[0.1], &env, &env).unwrap();
        assert!(u.is_infinite() && l.is_infinite());
    }

    #[test]
    fn general_bound_rejects_mismatched_lists() {
        let env = CgfEnvelope::quadratic(1.0);
        assert!(envelope_pair_bound(&[0.1], &[0.1, 0.2], &env, &env).is_err());
    }

    #[test]
    fn gen_bound_zero_information() {
        let sg = half_params();
        for kind in [
            BoundKind::Mi,
            BoundKind::Lautum,
            BoundKind::Js(alpha(0.3)),
            BoundKind::Renyi(alpha(0.3)),
            BoundKind::Sibson(alpha(0.3)),
            BoundKind::PinskerRenyi(alpha(0.3)),
        ] {
            assert_eq!(gen_bound(&[0.0, 0.0], kind, &sg).unwrap().value, 0.0);
        }
    }

    #[test]
    fn gen_bound_js_correlated_bit_hand_value() {
        // I_JS^{1/2} of the perfectly correlated uniform bit is 0.75 log(4/3);
        // plugging it into the α-JS formula with σ_(α) = 1/2, n = 1.
        let info = 0.75 * (4.0f64 / 3.0).ln();
        let got = gen_bound(&[info], BoundKind::Js(alpha(0.5)), &half_params())
            .unwrap()
            .value;
        let expect = (2.0 * 0.25 * info / 0.25).sqrt();
        assert_relative_eq!(got, expect, max_relative = 1e-14);

        // And that frozen information value matches the measures module.
        let j = JointDist::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let ijs = info_measure(&j, InfoKind::Js(alpha(0.5))).unwrap();
        assert_relative_eq!(ijs, info, max_relative = 1e-12);
    }

    #[test]
    fn gen_bound_renyi_hand_value() {
        let got = gen_bound(&[2.0f64.ln()], BoundKind::Renyi(alpha(0.5)), &half_params())
            .unwrap()
            .value;
        assert_relative_eq!(got, 2.0f64.ln().sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn gen_bound_missing_parameter() {
        let sg = SubGaussianParams {
            sigma: None,
            gamma: Some(0.5),
            sigma_alpha: None,
            loss_range: None,
        };
        assert!(gen_bound(&[0.1], BoundKind::Mi, &sg).is_err());
        assert!(gen_bound(&[0.1], BoundKind::Js(alpha(0.5)), &sg).is_err());
        assert!(gen_bound(&[0.1], BoundKind::Lautum, &sg).is_ok());
    }

    #[test]
    fn gen_bound_infinite_information() {
        let got = gen_bound(&[f64::INFINITY, 0.1], BoundKind::Mi, &half_params()).unwrap();
        assert!(got.value.is_infinite());
    }

    #[test]
    fn constant_bound_hand_values() {
        let sg = SubGaussianParams::with_sigmas(1.0, 1.0, 1.0);
        let got = js_constant_bound(&sg, alpha(0.5)).unwrap().value;
        assert_relative_eq!(got, 2.0 * (2.0 * 2.0f64.ln()).sqrt(), epsilon = 1e-12);

        // Unit-width loss range: below the total-variation constant 2(b-a).
        let sg = half_params();
        let got = js_constant_bound(&sg, alpha(0.5)).unwrap().value;
        assert_relative_eq!(got, (2.0 * 2.0f64.ln()).sqrt(), epsilon = 1e-12);
        assert!(got < 2.0);
    }

    #[test]
    fn constant_bound_minimized_at_half() {
        let sg = half_params();
        let at_half = js_constant_bound(&sg, alpha(0.5)).unwrap().value;
        for i in 1..10 {
            let a = i as f64 / 10.0;
            let v = js_constant_bound(&sg, alpha(a)).unwrap().value;
            assert!(v >= at_half - 1e-12, "alpha={a}: {v} < {at_half}");
        }
    }

    #[test]
    fn js_bound_dominated_by_constant_bound() {
        // Any joint's JS information is capped by h(α), so the data-dependent
        // bound never exceeds the constant one.
        let j = JointDist::from_rows(&[vec![0.49, 0.01], vec![0.01, 0.49]]).unwrap();
        let sg = half_params();
        for a in [0.1, 0.4, 0.8] {
            let a = alpha(a);
            let info = info_measure(&j, InfoKind::Js(a)).unwrap();
            let data = gen_bound(&[info], BoundKind::Js(a), &sg).unwrap().value;
            let constant = js_constant_bound(&sg, a).unwrap().value;
            assert!(data <= constant + 1e-12);
        }
    }

    #[test]
    fn tightness_threshold_hand_values() {
        let sg = half_params();
        // α -> 1, α' = 1/2: threshold tends to 4 log 2.
        let (_, thr) =
            tightness_comparison(alpha(0.5), alpha(1.0 - 1e-6), &[1.0], &sg).unwrap();
        assert_relative_eq!(thr, 4.0 * 2.0f64.ln(), max_relative = 1e-5);

        // α = α' = 1/2: threshold = 2 log 2.
        let (flags, thr) = tightness_comparison(alpha(0.5), alpha(0.5), &[0.0, 10.0], &sg).unwrap();
        assert_relative_eq!(thr, 2.0 * 2.0f64.ln(), max_relative = 1e-12);
        assert_eq!(flags, vec![false, true]);
    }

    #[test]
    fn tightness_requires_common_sigma() {
        let sg = SubGaussianParams::with_sigmas(0.5, 0.7, 0.5);
        assert!(tightness_comparison(alpha(0.5), alpha(0.5), &[1.0], &sg).is_err());
    }

    #[test]
    fn mismatch_reduces_to_gen_bound_without_shift() {
        let sg = half_params();
        let info = [0.2, 0.4];
        let a = alpha(0.3);
        let with = mismatch_bound(0.0, &info, MismatchKind::Js(a), &sg).unwrap();
        let without = gen_bound(&info, BoundKind::Js(a), &sg).unwrap();
        assert_relative_eq!(with.value, without.value, max_relative = 1e-14);

        let zero = mismatch_bound(0.0, &[0.0], MismatchKind::Renyi(a), &sg).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn mismatch_disjoint_laws_stay_finite() {
        // JS_{1/2}(δ_1 ‖ δ_0) = log 2; with zero information and σ_(α) = 1/2
        // the bound is √(2 log 2) even though the two laws are disjoint.
        let sg = half_params();
        let got = mismatch_bound(2.0f64.ln(), &[0.0], MismatchKind::Js(alpha(0.5)), &sg)
            .unwrap()
            .value;
        assert_relative_eq!(got, (2.0 * 2.0f64.ln()).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn js_bound_limits_recover_mi_and_lautum() {
        // On a full-support joint the α-JS bound approaches the MI bound as
        // α -> 1 and the Lautum bound as α -> 0, within 1%.
        let j = JointDist::from_rows(&[vec![0.35, 0.15], vec![0.1, 0.4]]).unwrap();
        let sg = half_params();
        let mi = info_measure(&j, InfoKind::Mi).unwrap();
        let lautum = info_measure(&j, InfoKind::Lautum).unwrap();
        let mi_bound = gen_bound(&[mi], BoundKind::Mi, &sg).unwrap().value;
        let lautum_bound = gen_bound(&[lautum], BoundKind::Lautum, &sg).unwrap().value;

        let a_hi = alpha(1.0 - 1e-4);
        let js_hi = info_measure(&j, InfoKind::Js(a_hi)).unwrap();
        let hi = gen_bound(&[js_hi], BoundKind::Js(a_hi), &sg).unwrap().value;
        assert_relative_eq!(hi, mi_bound, max_relative = 0.01);

        let a_lo = alpha(1e-4);
        let js_lo = info_measure(&j, InfoKind::Js(a_lo)).unwrap();
        let lo = gen_bound(&[js_lo], BoundKind::Js(a_lo), &sg).unwrap().value;
        assert_relative_eq!(lo, lautum_bound, max_relative = 0.01);
    }

    #[test]
    fn sibson_bound_never_exceeds_renyi_bound() {
        let j = JointDist::from_rows(&[vec![0.5, 0.25], vec![0.05, 0.2]]).unwrap();
        let sg = half_params();
        for a in [0.2, 0.5, 0.8] {
            let a = alpha(a);
            let s = info_measure(&j, InfoKind::Sibson(a)).unwrap();
            let r = info_measure(&j, InfoKind::Renyi(a)).unwrap();
            let sb = gen_bound(&[s], BoundKind::Sibson(a), &sg).unwrap().value;
            let rb = gen_bound(&[r], BoundKind::Renyi(a), &sg).unwrap().value;
            assert!(sb <= rb + 1e-12);
        }
    }
}
