//! Shared numeric utilities: compensated summation, reproducible RNG
//! streams, Gauss–Hermite nodes and small statistical helpers.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Neumaier-compensated sum of a stream of terms.
pub fn comp_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            c += (sum - s) + t;
        } else {
            c += (t - s) + sum;
        }
        sum = s;
    }
    sum + c
}

/// Compensated sum after ordering terms by descending magnitude.
///
/// Divergence identities are asserted at 1e-9 relative tolerance, which the
/// plain left-to-right sum does not reliably deliver on adversarial inputs.
pub fn stable_sum(terms: &[f64]) -> f64 {
    if terms.iter().any(|t| t.is_infinite()) {
        // +inf dominates; mixed signs of infinity never arise here.
        return terms.iter().copied().sum();
    }
    let mut sorted = terms.to_vec();
    sorted.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
    comp_sum(sorted)
}

/// log(sum_i exp(x_i)) guarded against overflow.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// SplitMix64 step; the documented stream-splitting function for all seeded
/// randomness in the crate.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Seed for sub-stream `index` of `master`. Derived streams are independent
/// of scheduling, so parallel and serial runs agree exactly.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Deterministic RNG for a derived stream.
pub fn stream_rng(master: u64, index: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(master, index))
}

/// Standard normal draw (Box–Muller; consumes two uniforms per pair).
pub struct NormalSource {
    spare: Option<f64>,
}

impl NormalSource {
    pub fn new() -> Self {
        NormalSource { spare: None }
    }

    pub fn next<R: Rng>(&mut self, rng: &mut R) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

impl Default for NormalSource {
    fn default() -> Self {
        Self::new()
    }
}

/// Uniform draw from the probability simplex via normalized exponentials.
pub fn random_simplex<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    // Renormalize exactly enough for the 1e-12 mass invariant.
    let s2: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s2;
    }
    v
}

/// Binomial pmf P[K = k] for K ~ Bin(n, p), computed in log space.
pub fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    assert!(k <= n);
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln_choose = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    (ln_choose + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Nodes and weights of the n-point Gauss–Hermite rule for weight e^{-x^2}.
///
/// Newton iteration on the Hermite recurrence; standard construction, exact
/// for polynomials of degree 2n-1.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let pim4 = 0.751_125_544_464_943; // pi^{-1/4}
    let mut z = 0.0f64;
    for i in 0..m {
        // Initial guesses from asymptotics (Numerical Recipes "gauher").
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    (nodes, weights)
}

/// Least-squares slope of y against x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn comp_sum_recovers_cancellation() {
        let terms = [1e16, 1.0, -1e16];
        assert_eq!(comp_sum(terms), 1.0);
        assert_eq!(stable_sum(&terms), 1.0);
    }

    #[test]
    fn stable_sum_propagates_infinity() {
        assert!(stable_sum(&[1.0, f64::INFINITY]).is_infinite());
    }

    #[test]
    fn derived_streams_differ() {
        assert_ne!(derive_seed(7, 0), derive_seed(7, 1));
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
    }

    #[test]
    fn simplex_sums_to_one() {
        let mut rng = stream_rng(3, 0);
        for k in 1..8 {
            let v = random_simplex(&mut rng, k);
            assert!(v.iter().all(|&x| x > 0.0));
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn binomial_pmf_sums_to_one() {
        for &(n, p) in &[(1usize, 0.3), (12, 0.5), (128, 0.77)] {
            let total: f64 = (0..=n).map(|k| binomial_pmf(n, k, p)).sum();
            assert_relative_eq!(total, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn gauss_hermite_matches_known_rules() {
        // n = 2: nodes +-1/sqrt(2), weights sqrt(pi)/2.
        let (x, w) = gauss_hermite(2);
        assert_relative_eq!(x[0], std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-12);
        assert_relative_eq!(w[0], std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-12);
        // Moments of e^{-x^2}: integral x^2 e^{-x^2} = sqrt(pi)/2.
        let (x, w) = gauss_hermite(64);
        let m0: f64 = w.iter().sum();
        let m2: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi * xi).sum();
        assert_relative_eq!(m0, std::f64::consts::PI.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(m2, std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-10);
    }

    #[test]
    fn normal_source_moments() {
        let mut rng = stream_rng(11, 0);
        let mut src = NormalSource::new();
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| src.next(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| x * x).sum::<f64>() / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn slope_of_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 6.0, 8.0];
        assert_relative_eq!(ls_slope(&x, &y), 2.0, max_relative = 1e-12);
    }
}
