use super::eig::hermitian_eig;
use super::matrix::{vec_norm, ComplexMatrix, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityTolerances {
    pub hermitian: f64,
    pub trace: f64,
    /// Most negative eigenvalue accepted.
    pub min_eigenvalue: f64,
}

impl Default for DensityTolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            trace: 1e-10,
            min_eigenvalue: -1e-9,
        }
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(ComplexMatrix);

impl DensityOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(m, &DensityTolerances::default())
    }

    pub fn with_tolerances(m: ComplexMatrix, tol: &DensityTolerances) -> Result<Self> {
        validate(&m, tol)?;
        Ok(Self(m.hermitian_part()))
    }

    /// Wraps a matrix the caller already knows to be a state.
    pub fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// `|ψ><ψ|` for the normalised `psi`.
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        let n = vec_norm(psi);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidDensity("state vector has zero or non-finite norm".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / n).collect();
        Ok(Self(ComplexMatrix::outer(&v, &v)))
    }

    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(p))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0).re
    }

    /// `a ρ + (1 - a) σ`
    pub fn mix(&self, a: f64, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidArgument(format!("mixing weight {a} outside [0, 1]")));
        }
        Ok(Self(&self.0.scale_real(a) + &other.0.scale_real(1.0 - a)))
    }
}

impl AsRef<ComplexMatrix> for DensityOperator {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

fn validate(m: &ComplexMatrix, tol: &DensityTolerances) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::InvalidDensity("non-finite entries".into()));
    }
    let herm = m.hermiticity_deviation();
    if herm > tol.hermitian {
        return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
    }
    let tr = m.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > tol.trace {
        return Err(Error::InvalidDensity(format!("trace {} != 1", tr.re)));
    }
    let eig = hermitian_eig(&m.hermitian_part())?;
    let min = eig.values[0];
    if min < tol.min_eigenvalue {
        return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}
