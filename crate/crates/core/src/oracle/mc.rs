use crate::error::Error;
use crate::measures::Alpha;
use crate::numeric::{logsumexp, stream_rng, NormalSource};
use crate::Result;
use rand_chacha::ChaCha12Rng;

/// A distribution the Monte Carlo estimators can sample and score.
pub trait McDist<T> {
    fn sample(&self, rng: &mut ChaCha12Rng, normals: &mut NormalSource) -> T;
    fn ln_pdf(&self, x: &T) -> f64;
}

/// Univariate Gaussian.
#[derive(Debug, Clone, Copy)]
pub struct Gaussian1 {
    pub mean: f64,
    pub var: f64,
}

impl McDist<f64> for Gaussian1 {
    fn sample(&self, rng: &mut ChaCha12Rng, normals: &mut NormalSource) -> f64 {
        self.mean + self.var.sqrt() * normals.next(rng)
    }

    fn ln_pdf(&self, x: &f64) -> f64 {
        let d = x - self.mean;
        -0.5 * (d * d / self.var + self.var.ln() + (2.0 * std::f64::consts::PI).ln())
    }
}

/// Bivariate Gaussian with explicit 2x2 covariance.
#[derive(Debug, Clone, Copy)]
pub struct Gaussian2 {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl Gaussian2 {
    pub fn det(&self) -> f64 {
        self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0]
    }

    fn chol(&self) -> [[f64; 2]; 2] {
        let l11 = self.cov[0][0].sqrt();
        let l21 = self.cov[0][1] / l11;
        let l22 = (self.cov[1][1] - l21 * l21).max(0.0).sqrt();
        [[l11, 0.0], [l21, l22]]
    }
}

impl McDist<[f64; 2]> for Gaussian2 {
    fn sample(&self, rng: &mut ChaCha12Rng, normals: &mut NormalSource) -> [f64; 2] {
        let l = self.chol();
        let z0 = normals.next(rng);
        let z1 = normals.next(rng);
        [
            self.mean[0] + l[0][0] * z0,
            self.mean[1] + l[1][0] * z0 + l[1][1] * z1,
        ]
    }

    fn ln_pdf(&self, x: &[f64; 2]) -> f64 {
        let det = self.det();
        let d0 = x[0] - self.mean[0];
        let d1 = x[1] - self.mean[1];
        let quad =
            (self.cov[1][1] * d0 * d0 - 2.0 * self.cov[0][1] * d0 * d1 + self.cov[0][0] * d1 * d1)
                / det;
        -0.5 * (quad + det.ln()) - (2.0 * std::f64::consts::PI).ln()
    }
}

/// Integrand selector matching the divergence conventions of `measures`.
#[derive(Debug, Clone, Copy)]
pub enum McKind {
    /// KL(p‖q) = E_p[ln p - ln q].
    Kl,
    /// renyi_div(p, q, α) = (1/(α-1)) ln E[q^α p^{1-α}]; the base measure is
    /// chosen by α (p for α ≤ 1/2, q otherwise) to keep the importance
    /// weights square-integrable.
    Renyi(Alpha),
    /// js_div(p, q, α) = α KL(q‖m) + (1-α) KL(p‖m), m the α q + (1-α) p
    /// mixture, each KL estimated under its own base measure.
    Js(Alpha),
}

/// Unbiased Monte Carlo divergence estimate with its standard error.
/// Deterministic for a fixed seed.
pub fn mc_divergence<T, P: McDist<T>, Q: McDist<T>>(
    p: &P,
    q: &Q,
    kind: McKind,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n_samples < 10_000 {
        return Err(Error::Precondition(format!(
            "need at least 1e4 samples, got {n_samples}"
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let mut normals = NormalSource::new();
    match kind {
        McKind::Kl => {
            let mut acc = Accumulator::new();
            for _ in 0..n_samples {
                let x = p.sample(&mut rng, &mut normals);
                acc.push(p.ln_pdf(&x) - q.ln_pdf(&x));
            }
            Ok(acc.mean_se())
        }
        McKind::Renyi(a) => {
            let alpha = a.value();
            let mut acc = Accumulator::new();
            if alpha <= 0.5 {
                // Z = E_p[(q/p)^α]
                for _ in 0..n_samples {
                    let x = p.sample(&mut rng, &mut normals);
                    acc.push((alpha * (q.ln_pdf(&x) - p.ln_pdf(&x))).exp());
                }
            } else {
                // Z = E_q[(p/q)^{1-α}]
                for _ in 0..n_samples {
                    let x = q.sample(&mut rng, &mut normals);
                    acc.push(((1.0 - alpha) * (p.ln_pdf(&x) - q.ln_pdf(&x))).exp());
                }
            }
            let (z, se_z) = acc.mean_se();
            let est = z.ln() / (alpha - 1.0);
            let se = se_z / (z * (1.0 - alpha));
            Ok((est, se))
        }
        McKind::Js(a) => {
            let alpha = a.value();
            let ln_mix = |x: &T| {
                logsumexp(&[alpha.ln() + q.ln_pdf(x), (1.0 - alpha).ln() + p.ln_pdf(x)])
            };
            let mut acc_q = Accumulator::new();
            for _ in 0..n_samples {
                let x = q.sample(&mut rng, &mut normals);
                acc_q.push(q.ln_pdf(&x) - ln_mix(&x));
            }
            let mut acc_p = Accumulator::new();
            for _ in 0..n_samples {
                let x = p.sample(&mut rng, &mut normals);
                acc_p.push(p.ln_pdf(&x) - ln_mix(&x));
            }
            let (kq, se_q) = acc_q.mean_se();
            let (kp, se_p) = acc_p.mean_se();
            let est = alpha * kq + (1.0 - alpha) * kp;
            let se = (alpha * alpha * se_q * se_q + (1.0 - alpha) * (1.0 - alpha) * se_p * se_p)
                .sqrt();
            Ok((est, se))
        }
    }
}

/// Streaming mean and standard error (Welford).
pub(crate) struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Accumulator { n: 0, mean: 0.0, m2: 0.0 }
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn mean_se(&self) -> (f64, f64) {
        let var = self.m2 / (self.n as f64 - 1.0);
        (self.mean, (var / self.n as f64).sqrt())
    }
}
