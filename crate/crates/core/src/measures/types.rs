use crate::error::Error;
use crate::numeric::stable_sum;
use crate::Result;

/// Mass-sum tolerance for distribution validation.
pub(crate) const MASS_TOL: f64 = 1e-12;

/// Interpolation / order parameter constrained to the open interval (0,1).
///
/// The α = 1/2 special cases (Jensen-Shannon divergence, Bhattacharyya
/// distance) are reached by setting the value to 0.5, not by separate code
/// paths; the endpoints are reached only as clamped limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::InvalidAlpha(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Alpha::new(v)
    }
}

/// Finite probability distribution over an ordered, labelled alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVec {
    atoms: Vec<String>,
    mass: Vec<f64>,
}

impl ProbVec {
    /// Validates non-negativity and unit mass (within 1e-12 absolute).
    pub fn new(atoms: Vec<String>, mass: Vec<f64>) -> Result<Self> {
        if atoms.len() != mass.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} atoms but {} masses",
                atoms.len(),
                mass.len()
            )));
        }
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if let Some(m) = mass.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::InvalidDistribution(format!("negative or non-finite mass {m}")));
        }
        let total = stable_sum(&mass);
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!("total mass {total} != 1")));
        }
        Ok(ProbVec { atoms, mass })
    }

    /// Distribution over atoms `"0".."k-1"`.
    pub fn from_mass(mass: Vec<f64>) -> Result<Self> {
        let atoms = (0..mass.len()).map(|i| i.to_string()).collect();
        ProbVec::new(atoms, mass)
    }

    /// Two-point distribution with P("1") = p.
    pub fn bernoulli(p: f64) -> Result<Self> {
        ProbVec::new(vec!["0".into(), "1".into()], vec![1.0 - p, p])
    }

    /// Point mass on the atom at `index` of an alphabet of size `k`.
    pub fn point_mass(k: usize, index: usize) -> Result<Self> {
        let mut mass = vec![0.0; k];
        mass[index] = 1.0;
        ProbVec::from_mass(mass)
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub(crate) fn check_same_alphabet(&self, other: &ProbVec) -> Result<()> {
        if self.atoms == other.atoms {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                self.atoms, other.atoms
            )))
        }
    }
}

/// Joint distribution over hypothesis × sample alphabets.
///
/// Mass is stored row-major: `mass[w * z_len + z]`, rows are hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    w_atoms: Vec<String>,
    z_atoms: Vec<String>,
    mass: Vec<f64>,
}

impl JointDist {
    pub fn new(w_atoms: Vec<String>, z_atoms: Vec<String>, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != w_atoms.len() * z_atoms.len() {
            return Err(Error::InvalidDistribution(format!(
                "mass length {} != {}x{}",
                mass.len(),
                w_atoms.len(),
                z_atoms.len()
            )));
        }
        if w_atoms.is_empty() || z_atoms.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if let Some(m) = mass.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::InvalidDistribution(format!("negative or non-finite mass {m}")));
        }
        let total = stable_sum(&mass);
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!("total mass {total} != 1")));
        }
        Ok(JointDist {
            w_atoms,
            z_atoms,
            mass,
        })
    }

    /// Joint over unlabelled index alphabets, row-major.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nw = rows.len();
        let nz = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != nz) {
            return Err(Error::InvalidDistribution("ragged rows".into()));
        }
        let w_atoms = (0..nw).map(|i| format!("w{i}")).collect();
        let z_atoms = (0..nz).map(|i| format!("z{i}")).collect();
        JointDist::new(w_atoms, z_atoms, rows.concat())
    }

    /// Independent product p ⊗ q.
    pub fn product_of(p_w: &ProbVec, p_z: &ProbVec) -> Result<Self> {
        let mut mass = Vec::with_capacity(p_w.len() * p_z.len());
        for pw in p_w.mass() {
            for pz in p_z.mass() {
                mass.push(pw * pz);
            }
        }
        // Tiny renormalization keeps the 1e-12 invariant after rounding.
        let total = stable_sum(&mass);
        for m in &mut mass {
            *m /= total;
        }
        JointDist::new(p_w.atoms().to_vec(), p_z.atoms().to_vec(), mass)
    }

    pub fn n_w(&self) -> usize {
        self.w_atoms.len()
    }

    pub fn n_z(&self) -> usize {
        self.z_atoms.len()
    }

    pub fn w_atoms(&self) -> &[String] {
        &self.w_atoms
    }

    pub fn z_atoms(&self) -> &[String] {
        &self.z_atoms
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn get(&self, w: usize, z: usize) -> f64 {
        self.mass[w * self.z_atoms.len() + z]
    }

    /// Marginal over hypotheses (row sums).
    pub fn w_marginal(&self) -> ProbVec {
        let nz = self.n_z();
        let mass: Vec<f64> = (0..self.n_w())
            .map(|w| stable_sum(&self.mass[w * nz..(w + 1) * nz]))
            .collect();
        Self::normalized_marginal(self.w_atoms.clone(), mass)
    }

    /// Marginal over samples (column sums).
    pub fn z_marginal(&self) -> ProbVec {
        let nz = self.n_z();
        let mass: Vec<f64> = (0..nz)
            .map(|z| {
                let col: Vec<f64> = (0..self.n_w()).map(|w| self.get(w, z)).collect();
                stable_sum(&col)
            })
            .collect();
        Self::normalized_marginal(self.z_atoms.clone(), mass)
    }

    fn normalized_marginal(atoms: Vec<String>, mut mass: Vec<f64>) -> ProbVec {
        let total = stable_sum(&mass);
        for m in &mut mass {
            *m /= total;
        }
        ProbVec::new(atoms, mass).expect("marginal of a valid joint is valid")
    }

    /// Product of the two marginals on the same alphabets.
    pub fn product_of_marginals(&self) -> JointDist {
        JointDist::product_of(&self.w_marginal(), &self.z_marginal())
            .expect("product of valid marginals is valid")
    }

    /// α-convex combination `α (P_W ⊗ P_Z) + (1-α) P_{W,Z}`.
    pub fn alpha_mixture(&self, alpha: Alpha) -> JointDist {
        let a = alpha.value();
        let prod = self.product_of_marginals();
        let mass: Vec<f64> = self
            .mass
            .iter()
            .zip(prod.mass())
            .map(|(j, p)| a * p + (1.0 - a) * j)
            .collect();
        JointDist::new(self.w_atoms.clone(), self.z_atoms.clone(), mass)
            .expect("mixture of valid joints is valid")
    }

    /// Normalized geometric mean `(P_W ⊗ P_Z)^α (P_{W,Z})^{1-α} / Z`.
    ///
    /// Cells where either factor vanishes carry zero mass.
    pub fn geometric_mean_with_product(&self, alpha: Alpha) -> JointDist {
        let a = alpha.value();
        let prod = self.product_of_marginals();
        let mut mass: Vec<f64> = self
            .mass
            .iter()
            .zip(prod.mass())
            .map(|(&j, &p)| {
                if j > 0.0 && p > 0.0 {
                    p.powf(a) * j.powf(1.0 - a)
                } else {
                    0.0
                }
            })
            .collect();
        let total = stable_sum(&mass);
        for m in &mut mass {
            *m /= total;
        }
        JointDist::new(self.w_atoms.clone(), self.z_atoms.clone(), mass)
            .expect("geometric mean of valid joints is valid")
    }

    /// Flattened view as a `ProbVec` over the paired alphabet, preserving
    /// cell order; used to reuse the divergence kernels on joints.
    pub fn flatten(&self) -> ProbVec {
        let mut atoms = Vec::with_capacity(self.mass.len());
        for w in &self.w_atoms {
            for z in &self.z_atoms {
                atoms.push(format!("{w}|{z}"));
            }
        }
        let mut mass = self.mass.clone();
        let total = stable_sum(&mass);
        for m in &mut mass {
            *m /= total;
        }
        ProbVec::new(atoms, mass).expect("flattened joint is valid")
    }

    pub(crate) fn check_same_alphabets(&self, other: &JointDist) -> Result<()> {
        if self.w_atoms == other.w_atoms && self.z_atoms == other.z_atoms {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch("joint alphabets differ".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn alpha_rejects_endpoints() {
        assert!(Alpha::new(0.0).is_err());
        assert!(Alpha::new(1.0).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::new(0.5).is_ok());
    }

    #[test]
    fn probvec_validation() {
        assert!(ProbVec::from_mass(vec![0.5, 0.5]).is_ok());
        assert!(ProbVec::from_mass(vec![0.5, 0.6]).is_err());
        assert!(ProbVec::from_mass(vec![-0.1, 1.1]).is_err());
        assert!(ProbVec::from_mass(vec![]).is_err());
    }

    #[test]
    fn joint_marginals_are_valid_and_consistent() {
        let j = JointDist::from_rows(&[vec![0.5, 0.25], vec![0.0, 0.25]]).unwrap();
        let pw = j.w_marginal();
        let pz = j.z_marginal();
        assert_relative_eq!(pw.mass()[0], 0.75);
        assert_relative_eq!(pz.mass()[0], 0.5);
        let prod = j.product_of_marginals();
        assert_relative_eq!(prod.get(1, 1), 0.25 * 0.5, max_relative = 1e-12);
    }

    #[test]
    fn mixture_interpolates() {
        let j = JointDist::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let m = j.alpha_mixture(Alpha::new(0.5).unwrap());
        assert_relative_eq!(m.get(0, 0), 0.5 * 0.25 + 0.5 * 0.5, max_relative = 1e-12);
        assert_relative_eq!(m.get(0, 1), 0.5 * 0.25, max_relative = 1e-12);
    }

    #[test]
    fn geometric_mean_of_product_is_product() {
        let j = JointDist::from_rows(&[vec![0.12, 0.28], vec![0.18, 0.42]]).unwrap();
        // This joint *is* a product, so the geometric mean must return it.
        let g = j.geometric_mean_with_product(Alpha::new(0.3).unwrap());
        for (a, b) in g.mass().iter().zip(j.mass()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }
}
