use super::basis::Basis;
use super::eig::{hermitian_eig, Eigen};
use super::matrix::{ComplexMatrix, C64};
use crate::error::Result;

/// Relative factor for the default degeneracy grouping tolerance.
pub const DEFAULT_GROUPING_FACTOR: f64 = 1e-8;

/// `H = Σ_ℓ E_ℓ Π_ℓ` with distinct energies in ascending order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    energies: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
    ranks: Vec<usize>,
    grouping_tol: f64,
    eigen: Eigen,
}

impl SpectralDecomposition {
    /// Decomposes `h` with the default grouping tolerance `1e-8 · max|E|`.
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(h, None)
    }

    /// Eigenvalues closer than `grouping_tol` (chained, after sorting) share a
    /// projector. `None` selects the default relative tolerance.
    pub fn with_tolerance(h: &ComplexMatrix, grouping_tol: Option<f64>) -> Result<Self> {
        let eigen = hermitian_eig(h)?;
        let tol = grouping_tol.unwrap_or_else(|| {
            let scale = eigen.values.iter().map(|e| e.abs()).fold(0.0, f64::max);
            DEFAULT_GROUPING_FACTOR * if scale > 0.0 { scale } else { 1.0 }
        });

        let d = h.dim();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for j in 0..d {
            match groups.last_mut() {
                Some(g) if (eigen.values[j] - eigen.values[*g.last().unwrap()]).abs() <= tol => g.push(j),
                _ => groups.push(vec![j]),
            }
        }

        let mut energies = Vec::with_capacity(groups.len());
        let mut projectors = Vec::with_capacity(groups.len());
        let mut ranks = Vec::with_capacity(groups.len());
        for g in &groups {
            let e = g.iter().map(|&j| eigen.values[j]).sum::<f64>() / g.len() as f64;
            let mut p = ComplexMatrix::zeros(d);
            for &j in g {
                let v = eigen.vector(j);
                p += &ComplexMatrix::outer(&v, &v);
            }
            energies.push(e);
            projectors.push(p);
            ranks.push(g.len());
        }

        Ok(Self {
            energies,
            projectors,
            ranks,
            grouping_tol: tol,
            eigen,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigen.vectors.dim()
    }

    /// Number of distinct energy levels.
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn projector(&self, level: usize) -> &ComplexMatrix {
        &self.projectors[level]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn grouping_tol(&self) -> f64 {
        self.grouping_tol
    }

    /// Raw eigenpairs underlying the decomposition.
    pub fn eigen(&self) -> &Eigen {
        &self.eigen
    }

    /// `Π_ℓ / rank(Π_ℓ)`: the post-measurement state for outcome `ℓ` when the
    /// sector is maximally mixed.
    pub fn normalized_projector(&self, level: usize) -> ComplexMatrix {
        self.projectors[level].scale_real(1.0 / self.ranks[level] as f64)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|e| C64::new(e, 0.0))
    }

    /// `Σ_ℓ f(E_ℓ) Π_ℓ`
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim());
        for (e, p) in self.energies.iter().zip(&self.projectors) {
            m += &p.scale(f(*e));
        }
        m
    }

    /// `e^{zH} = Σ_ℓ e^{z E_ℓ} Π_ℓ`
    pub fn exp_scaled(&self, z: C64) -> ComplexMatrix {
        self.apply_fn(|e| (z * e).exp())
    }

    /// `Tr(ρ Π_ℓ)` for every level (real part; imaginary part is round-off for
    /// Hermitian `ρ`).
    pub fn level_weights(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.projectors.iter().map(|p| rho.trace_product(p).re).collect()
    }

    /// The eigenvector basis, ordered by ascending eigenvalue.
    pub fn eigenbasis(&self) -> Basis {
        Basis::from_unitary_unchecked(self.eigen.vectors.clone(), "energy eigenbasis")
    }
}

/// `e^{zH}` through the spectral decomposition of `h`.
pub fn matrix_phase_exp(h: &ComplexMatrix, z: C64) -> Result<ComplexMatrix> {
    Ok(SpectralDecomposition::new(h)?.exp_scaled(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::{I, ONE};

    fn two_qubit_h() -> ComplexMatrix {
        let sz = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let id = ComplexMatrix::identity(2);
        &sz.kron(&id) + &id.kron(&sz)
    }

    #[test]
    fn tensor_structure_levels() {
        let s = SpectralDecomposition::new(&two_qubit_h()).unwrap();
        assert_eq!(s.energies(), &[-2.0, 0.0, 2.0]);
        assert_eq!(s.ranks(), &[1, 2, 1]);
    }

    #[test]
    fn identity_single_level() {
        let s = SpectralDecomposition::new(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(s.energies(), &[1.0]);
        assert_eq!(s.ranks(), &[4]);
        assert!(s.projector(0).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn three_level_bare_hamiltonian() {
        let h = ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 3.0]);
        let s = SpectralDecomposition::new(&h).unwrap();
        assert_eq!(s.energies(), &[0.0, 1.0, 3.0]);
        assert_eq!(s.ranks(), &[1, 1, 1]);
    }

    #[test]
    fn noisy_degeneracy_is_grouped() {
        let h = ComplexMatrix::from_real_diagonal(&[2.0, 1e-13, -1e-13, -2.0]);
        let s = SpectralDecomposition::new(&h).unwrap();
        assert_eq!(s.ranks(), &[1, 2, 1]);
    }

    #[test]
    fn phase_exp_zero_is_identity() {
        let h = ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 3.0]);
        let e = matrix_phase_exp(&h, C64::new(0.0, 0.0)).unwrap();
        assert!(e.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn phase_exp_sigma_z() {
        let sz = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let e = matrix_phase_exp(&sz, I * std::f64::consts::FRAC_PI_2).unwrap();
        let expect = ComplexMatrix::from_diagonal(&[I, -I]);
        assert!(e.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn phase_exp_gibbs_weights() {
        let beta = 0.7;
        let h = ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 3.0]);
        let e = matrix_phase_exp(&h, ONE * (-beta)).unwrap();
        // elementwise scalar exponentials
        let oracle = [1.0, (-beta).exp(), (-3.0 * beta).exp()];
        for (i, w) in oracle.iter().enumerate() {
            assert!((e[(i, i)].re - w).abs() < 1e-15);
        }
    }
}
