use std::sync::Arc;

/// Convex upper envelope ψ(λ) of a cumulant generating function, defined on
/// [0, b) with ψ(0) = ψ'(0) = 0.
#[derive(Clone)]
pub enum CgfEnvelope {
    /// ψ(λ) = σ²λ²/2 on [0, ∞); the sub-Gaussian envelope, whose inverse
    /// dual is √(2σ²y).
    Quadratic { sigma: f64 },
    /// ψ(λ) = vλ²/(2(1-cλ)) on [0, 1/c); the sub-gamma envelope, whose
    /// inverse dual is √(2vy) + cy.
    SubGamma { v: f64, c: f64 },
    /// Arbitrary convex envelope on [0, b); `b = f64::INFINITY` allowed.
    Custom {
        psi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        domain_upper: f64,
    },
}

impl std::fmt::Debug for CgfEnvelope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CgfEnvelope::Quadratic { sigma } => write!(f, "Quadratic(sigma={sigma})"),
            CgfEnvelope::SubGamma { v, c } => write!(f, "SubGamma(v={v}, c={c})"),
            CgfEnvelope::Custom { domain_upper, .. } => write!(f, "Custom(b={domain_upper})"),
        }
    }
}

impl CgfEnvelope {
    pub fn quadratic(sigma: f64) -> Self {
        assert!(sigma >= 0.0);
        CgfEnvelope::Quadratic { sigma }
    }

    pub fn sub_gamma(v: f64, c: f64) -> Self {
        assert!(v >= 0.0 && c > 0.0);
        CgfEnvelope::SubGamma { v, c }
    }

    pub fn custom<F>(psi: F, domain_upper: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        assert!(domain_upper > 0.0);
        CgfEnvelope::Custom {
            psi: Arc::new(psi),
            domain_upper,
        }
    }

    pub fn psi(&self, lambda: f64) -> f64 {
        match self {
            CgfEnvelope::Quadratic { sigma } => 0.5 * sigma * sigma * lambda * lambda,
            CgfEnvelope::SubGamma { v, c } => v * lambda * lambda / (2.0 * (1.0 - c * lambda)),
            CgfEnvelope::Custom { psi, .. } => psi(lambda),
        }
    }

    pub fn domain_upper(&self) -> f64 {
        match self {
            CgfEnvelope::Quadratic { .. } => f64::INFINITY,
            CgfEnvelope::SubGamma { c, .. } => 1.0 / c,
            CgfEnvelope::Custom { domain_upper, .. } => *domain_upper,
        }
    }

    /// Checks ψ(0) = 0, ψ'(0) = 0 (finite differences at λ = 1e-6) and the
    /// midpoint convexity inequality on a deterministic triple grid.
    pub fn validate(&self) -> crate::Result<()> {
        let at_zero = self.psi(0.0);
        if at_zero.abs() > 1e-12 {
            return Err(crate::Error::Domain(format!("psi(0) = {at_zero} != 0")));
        }
        let h = 1e-6;
        let slope = (self.psi(h) - at_zero) / h;
        if slope.abs() > 1e-4 {
            return Err(crate::Error::Domain(format!("psi'(0) ~ {slope} != 0")));
        }
        let b = self.domain_upper().min(1e3);
        for i in 1..8 {
            for j in (i + 1)..9 {
                let x = b * i as f64 / 10.0;
                let y = b * j as f64 / 10.0;
                let mid = 0.5 * (x + y);
                if self.psi(mid) > 0.5 * (self.psi(x) + self.psi(y)) + 1e-9 * (1.0 + self.psi(y).abs())
                {
                    return Err(crate::Error::Domain(format!(
                        "midpoint convexity fails between {x} and {y}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Inverse Legendre dual ψ*⁻¹(y) = inf over λ in (0, b) of (y + ψ(λ))/λ.
///
/// The map is unimodal for convex ψ with ψ(0) = ψ'(0) = 0, so a 64-point
/// log-spaced scan localizes the minimum and golden-section search refines
/// it to 1e-10 relative. The result is nondecreasing and concave in y and
/// equals √(2σ²y) for quadratic envelopes.
pub fn inverse_legendre_dual(env: &CgfEnvelope, y: f64) -> f64 {
    assert!(y >= 0.0 || y.is_nan(), "y must be nonnegative");
    if y == 0.0 {
        // inf over λ of ψ(λ)/λ -> 0 as λ -> 0 since ψ'(0) = 0.
        return 0.0;
    }
    if y.is_infinite() {
        return f64::INFINITY;
    }
    let objective = |lambda: f64| (y + env.psi(lambda)) / lambda;

    let b = env.domain_upper();
    let lo = 1e-8f64;
    let hi = if b.is_finite() {
        b * (1.0 - 1e-9)
    } else {
        // Expand until the log-grid minimum is interior.
        let mut hi = 1.0f64;
        loop {
            let f_hi = objective(hi);
            let f_in = objective(hi * 0.5);
            if f_hi > f_in || hi > 1e12 {
                break hi;
            }
            hi *= 4.0;
        }
    };

    // 64-point scan in log(lambda).
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let n = 64;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let l = (ln_lo + (ln_hi - ln_lo) * i as f64 / (n - 1) as f64).exp();
        let f = objective(l);
        if f < best {
            best = f;
            best_i = i;
        }
    }
    let bracket = |i: i64| {
        let i = i.clamp(0, n as i64 - 1);
        (ln_lo + (ln_hi - ln_lo) * i as f64 / (n - 1) as f64).exp()
    };
    let (mut a, mut c) = (bracket(best_i as i64 - 1), bracket(best_i as i64 + 1));

    // Golden-section to 1e-10 relative bracket width.
    let inv_phi = 0.618_033_988_749_894_9;
    let mut x1 = c - inv_phi * (c - a);
    let mut x2 = a + inv_phi * (c - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while (c - a) > 1e-10 * a.abs().max(1e-12) {
        if f1 < f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - inv_phi * (c - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (c - a);
            f2 = objective(x2);
        }
    }
    best.min(f1).min(f2)
}
