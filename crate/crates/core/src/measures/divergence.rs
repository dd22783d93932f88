use super::types::{Alpha, JointDist, ProbVec};
use crate::numeric::stable_sum;
use crate::Result;

/// KL divergence Σ p_i log(p_i/q_i).
///
/// Returns `+inf` when q_i = 0 < p_i for some atom (absolute continuity
/// fails); 0·log(0/·) contributes nothing.
pub fn kl(p: &ProbVec, q: &ProbVec) -> Result<f64> {
    p.check_same_alphabet(q)?;
    Ok(kl_mass(p.mass(), q.mass()))
}

pub(crate) fn kl_mass(p: &[f64], q: &[f64]) -> f64 {
    let mut terms = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return f64::INFINITY;
        }
        terms.push(pi * (pi / qi).ln());
    }
    stable_sum(&terms)
}

/// α-Rényi divergence, first argument carrying exponent 1-α:
///
/// renyi_div(p, q, α) = (1/(α-1)) log Σ q_i^α p_i^{1-α}
///
/// Finite whenever p and q are not mutually singular; `+inf` otherwise.
/// α = 1/2 gives twice the Bhattacharyya distance.
pub fn renyi_div(p: &ProbVec, q: &ProbVec, a: Alpha) -> Result<f64> {
    p.check_same_alphabet(q)?;
    Ok(renyi_mass(p.mass(), q.mass(), a.value()))
}

pub(crate) fn renyi_mass(p: &[f64], q: &[f64], a: f64) -> f64 {
    let mut terms = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 && qi > 0.0 {
            terms.push(qi.powf(a) * pi.powf(1.0 - a));
        }
    }
    let sum = stable_sum(&terms);
    if sum <= 0.0 {
        return f64::INFINITY;
    }
    sum.ln() / (a - 1.0)
}

/// α-Jensen-Shannon divergence, first argument carrying weight 1-α:
///
/// js_div(p, q, α) = α KL(q‖m) + (1-α) KL(p‖m),  m = α q + (1-α) p
///
/// Always finite and bounded by h(α); α = 1/2 is the classical JSD.
pub fn js_div(p: &ProbVec, q: &ProbVec, a: Alpha) -> Result<f64> {
    p.check_same_alphabet(q)?;
    Ok(js_mass(p.mass(), q.mass(), a.value()))
}

pub(crate) fn js_mass(p: &[f64], q: &[f64], a: f64) -> f64 {
    let m: Vec<f64> = p
        .iter()
        .zip(q)
        .map(|(&pi, &qi)| a * qi + (1.0 - a) * pi)
        .collect();
    a * kl_mass(q, &m) + (1.0 - a) * kl_mass(p, &m)
}

/// Binary entropy in nats, h(α) = -α log α - (1-α) log(1-α); the supremum
/// of the α-JS divergence.
pub fn binary_entropy(a: Alpha) -> f64 {
    let x = a.value();
    -x * x.ln() - (1.0 - x) * (1.0 - x).ln()
}

/// Splits the convex KL combination against an auxiliary joint into the α-JS
/// information plus a mixture-anchored remainder:
///
/// α KL(P_W⊗P_Z ‖ aux) + (1-α) KL(P_{W,Z} ‖ aux)
///     = I_JS^α(W;Z) + KL(P^{(α)} ‖ aux)
///
/// Returns `(lhs, residual)`; the residual vanishes iff `aux` equals the
/// α-mixture, which is therefore the optimal auxiliary.
pub fn js_mixture_decomposition(
    j: &JointDist,
    aux: &JointDist,
    a: Alpha,
) -> Result<(f64, f64)> {
    j.check_same_alphabets(aux)?;
    let alpha = a.value();
    let prod = j.product_of_marginals();
    let lhs = alpha * kl_mass(prod.mass(), aux.mass()) + (1.0 - alpha) * kl_mass(j.mass(), aux.mass());
    let mix = j.alpha_mixture(a);
    let residual = kl_mass(mix.mass(), aux.mass());
    Ok((lhs, residual))
}

/// Splits the reversed convex KL combination into the α-Rényi information
/// plus a geometric-mean-anchored remainder:
///
/// α KL(aux ‖ P_W⊗P_Z) + (1-α) KL(aux ‖ P_{W,Z})
///     = (1-α) I_R^α(W;Z) + KL(aux ‖ G),
/// G ∝ (P_W⊗P_Z)^α (P_{W,Z})^{1-α}
///
/// Returns `(lhs, residual)`; the residual vanishes iff `aux` equals the
/// normalized geometric mean.
pub fn renyi_geometric_decomposition(
    j: &JointDist,
    aux: &JointDist,
    a: Alpha,
) -> Result<(f64, f64)> {
    j.check_same_alphabets(aux)?;
    let alpha = a.value();
    let prod = j.product_of_marginals();
    let lhs =
        alpha * kl_mass(aux.mass(), prod.mass()) + (1.0 - alpha) * kl_mass(aux.mass(), j.mass());
    let geo = j.geometric_mean_with_product(a);
    let residual = kl_mass(aux.mass(), geo.mass());
    Ok((lhs, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{info_measure, InfoKind};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bern(p: f64) -> ProbVec {
        ProbVec::bernoulli(p).unwrap()
    }

    fn alpha(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    // Independent JSD route: H(m) - (H(p) + H(q))/2 on the plain mixture.
    fn jsd_entropy_route(p: &[f64], q: &[f64]) -> f64 {
        fn entropy(v: &[f64]) -> f64 {
            -v.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
        }
        let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
        entropy(&m) - 0.5 * entropy(p) - 0.5 * entropy(q)
    }

    #[test]
    fn kl_identity_is_zero() {
        let p = bern(0.3);
        assert_eq!(kl(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn kl_bernoulli_hand_value() {
        // Two-term sum: 0.5 log(0.5/0.75) + 0.5 log(0.5/0.25).
        let got = kl(&bern(0.5), &bern(0.25)).unwrap();
        let expect = 0.5 * (2.0f64 / 3.0).ln() + 0.5 * 2.0f64.ln();
        assert_relative_eq!(got, expect, max_relative = 1e-14);
        assert_relative_eq!(got, 0.14384103622589045, max_relative = 1e-12);
    }

    #[test]
    fn kl_disjoint_supports_is_infinite() {
        let d0 = ProbVec::point_mass(2, 0).unwrap();
        let d1 = ProbVec::point_mass(2, 1).unwrap();
        assert!(kl(&d0, &d1).unwrap().is_infinite());
    }

    #[test]
    fn kl_alphabet_mismatch_errors() {
        let p = bern(0.5);
        let q = ProbVec::new(vec!["a".into(), "b".into()], vec![0.5, 0.5]).unwrap();
        assert!(kl(&p, &q).is_err());
    }

    #[test]
    fn renyi_identity_is_zero() {
        let p = bern(0.4);
        for a in [0.1, 0.5, 0.9] {
            assert_relative_eq!(renyi_div(&p, &p, alpha(a)).unwrap(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn renyi_bernoulli_hand_value() {
        // Bhattacharyya coefficient of Bern(.5) vs Bern(.25), times two.
        let got = renyi_div(&bern(0.5), &bern(0.25), alpha(0.5)).unwrap();
        let expect = -2.0 * ((0.25f64 * 0.5).sqrt() + (0.75f64 * 0.5).sqrt()).ln();
        assert_relative_eq!(got, expect, max_relative = 1e-14);
    }

    #[test]
    fn renyi_point_mass_vs_uniform() {
        let d0 = ProbVec::point_mass(2, 0).unwrap();
        let got = renyi_div(&d0, &bern(0.5), alpha(0.5)).unwrap();
        assert_relative_eq!(got, 2.0f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn renyi_mutually_singular_is_infinite() {
        let d0 = ProbVec::point_mass(2, 0).unwrap();
        let d1 = ProbVec::point_mass(2, 1).unwrap();
        assert!(renyi_div(&d0, &d1, alpha(0.3)).unwrap().is_infinite());
    }

    #[test]
    fn renyi_alpha_one_limit_is_reversed_kl() {
        // Endpoint behaviour is exposed only as a clamped limit check.
        let (p, q) = (bern(0.3), bern(0.6));
        let near_one = renyi_div(&p, &q, alpha(1.0 - 1e-3)).unwrap();
        let rev = kl(&q, &p).unwrap();
        assert_relative_eq!(near_one, rev, max_relative = 2e-3);
        let near_zero = renyi_div(&p, &q, alpha(1e-3)).unwrap();
        assert!(near_zero.abs() < 2e-3);
    }

    #[test]
    fn js_identity_is_zero() {
        let p = bern(0.7);
        assert_relative_eq!(js_div(&p, &p, alpha(0.3)).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn js_disjoint_saturates_binary_entropy() {
        let d0 = ProbVec::point_mass(2, 0).unwrap();
        let d1 = ProbVec::point_mass(2, 1).unwrap();
        for a in [0.2, 0.5, 0.8] {
            let got = js_div(&d1, &d0, alpha(a)).unwrap();
            assert_relative_eq!(got, binary_entropy(alpha(a)), max_relative = 1e-12);
        }
    }

    #[test]
    fn js_bernoulli_matches_direct_summation() {
        // Oracle: the two KL terms against the explicit mixture, by hand.
        let (p, q, a) = (bern(0.5), bern(0.25), 0.5);
        let m = [0.5 * 0.75 + 0.5 * 0.5, 0.5 * 0.25 + 0.5 * 0.5];
        let oracle = a * kl_mass(q.mass(), &m) + (1.0 - a) * kl_mass(p.mass(), &m);
        let got = js_div(&p, &q, alpha(a)).unwrap();
        assert_relative_eq!(got, oracle, max_relative = 1e-14);
    }

    #[test]
    fn js_at_half_is_classical_jsd() {
        let p = bern(0.15);
        let q = bern(0.62);
        let got = js_div(&p, &q, alpha(0.5)).unwrap();
        assert_relative_eq!(got, jsd_entropy_route(p.mass(), q.mass()), max_relative = 1e-12);
    }

    #[test]
    fn js_decomposition_special_auxiliaries() {
        let j = JointDist::from_rows(&[vec![0.32, 0.18], vec![0.13, 0.37]]).unwrap();
        let a = alpha(0.35);
        let ijs = info_measure(&j, InfoKind::Js(a)).unwrap();

        // Optimal auxiliary: the α-mixture itself.
        let (lhs, residual) = js_mixture_decomposition(&j, &j.alpha_mixture(a), a).unwrap();
        assert!(residual.abs() < 1e-13);
        assert_relative_eq!(lhs, ijs, max_relative = 1e-12);

        // aux = product: lhs must equal (1-α)·I(W;Z), both routes summed directly.
        let prod = j.product_of_marginals();
        let (lhs, residual) = js_mixture_decomposition(&j, &prod, a).unwrap();
        let mi = info_measure(&j, InfoKind::Mi).unwrap();
        assert_relative_eq!(lhs, (1.0 - a.value()) * mi, max_relative = 1e-12);
        assert_relative_eq!(lhs, ijs + residual, max_relative = 1e-12);
    }

    #[test]
    fn js_decomposition_on_product_joint() {
        let j = JointDist::from_rows(&[vec![0.12, 0.28], vec![0.18, 0.42]]).unwrap();
        let aux = JointDist::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        let a = alpha(0.6);
        let (lhs, residual) = js_mixture_decomposition(&j, &aux, a).unwrap();
        let direct = kl_mass(j.product_of_marginals().mass(), aux.mass());
        assert_relative_eq!(lhs, direct, max_relative = 1e-12);
        assert_relative_eq!(residual, direct, max_relative = 1e-12);
        assert!(info_measure(&j, InfoKind::Js(a)).unwrap().abs() < 1e-13);
    }

    #[test]
    fn renyi_decomposition_special_auxiliaries() {
        let j = JointDist::from_rows(&[vec![0.32, 0.18], vec![0.13, 0.37]]).unwrap();
        let a = alpha(0.35);
        let ir = info_measure(&j, InfoKind::Renyi(a)).unwrap();

        // Optimal auxiliary: the normalized geometric mean.
        let (lhs, residual) =
            renyi_geometric_decomposition(&j, &j.geometric_mean_with_product(a), a).unwrap();
        assert!(residual.abs() < 1e-13);
        assert_relative_eq!(lhs, (1.0 - a.value()) * ir, max_relative = 1e-12);

        // aux = joint: lhs = α·I(W;Z), both sides by direct summation.
        let (lhs, _) = renyi_geometric_decomposition(&j, &j, a).unwrap();
        let mi = info_measure(&j, InfoKind::Mi).unwrap();
        assert_relative_eq!(lhs, a.value() * mi, max_relative = 1e-12);
    }

    #[test]
    fn renyi_decomposition_on_product_joint() {
        let j = JointDist::from_rows(&[vec![0.12, 0.28], vec![0.18, 0.42]]).unwrap();
        let aux = JointDist::from_rows(&[vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let a = alpha(0.25);
        let (lhs, _) = renyi_geometric_decomposition(&j, &aux, a).unwrap();
        let direct = kl_mass(aux.mass(), j.product_of_marginals().mass());
        assert_relative_eq!(lhs, direct, max_relative = 1e-12);
        assert!(info_measure(&j, InfoKind::Renyi(a)).unwrap().abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn js_bounded_by_binary_entropy(
            raw in proptest::collection::vec(1e-6..1.0f64, 4),
            raw2 in proptest::collection::vec(1e-6..1.0f64, 4),
            a in 0.01..0.99f64,
        ) {
            let norm = |v: &[f64]| {
                let s: f64 = v.iter().sum();
                ProbVec::from_mass(v.iter().map(|x| x / s).collect()).unwrap()
            };
            let (p, q) = (norm(&raw), norm(&raw2));
            let a = alpha(a);
            let d = js_div(&p, &q, a).unwrap();
            prop_assert!(d >= -1e-12);
            prop_assert!(d <= binary_entropy(a) + 1e-12);
        }

        #[test]
        fn renyi_nondecreasing_in_alpha(
            raw in proptest::collection::vec(1e-4..1.0f64, 3),
            raw2 in proptest::collection::vec(1e-4..1.0f64, 3),
        ) {
            let norm = |v: &[f64]| {
                let s: f64 = v.iter().sum();
                ProbVec::from_mass(v.iter().map(|x| x / s).collect()).unwrap()
            };
            let (p, q) = (norm(&raw), norm(&raw2));
            let grid = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
            let mut prev = f64::NEG_INFINITY;
            for a in grid {
                let d = renyi_div(&p, &q, alpha(a)).unwrap();
                prop_assert!(d >= prev - 1e-10);
                prev = d;
            }
        }
    }
}
