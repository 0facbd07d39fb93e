//! Dephasing, population/coherence splitting and the l1 coherence measure.

use super::basis::Basis;
use super::density::DensityOperator;
use super::matrix::{ComplexMatrix, ZERO};
use super::spectral::SpectralDecomposition;
use crate::error::{Error, Result};

/// How the population part of a state is defined.
#[derive(Debug, Clone)]
pub enum Dephasing {
    /// Keep only the diagonal in a declared orthonormal basis.
    InBasis(Basis),
    /// Keep the blocks `Π_ℓ ρ Π_ℓ` of the initial Hamiltonian's energy sectors.
    EnergySectors,
}

impl Dephasing {
    pub fn computational(dim: usize) -> Self {
        Self::InBasis(Basis::computational(dim))
    }

    pub fn label(&self) -> &str {
        match self {
            Self::InBasis(b) => b.label(),
            Self::EnergySectors => "energy sectors",
        }
    }

    /// Applies the scheme; `sectors` is only consulted for
    /// [`Dephasing::EnergySectors`].
    pub fn apply(&self, rho: &DensityOperator, sectors: &SpectralDecomposition) -> Result<DensityOperator> {
        match self {
            Self::InBasis(b) => dephase(rho, b),
            Self::EnergySectors => dephase_sectors(rho, sectors),
        }
    }

    pub fn split(&self, rho: &DensityOperator, sectors: &SpectralDecomposition) -> Result<CoherenceSplit> {
        let populations = self.apply(rho, sectors)?;
        let coherences = rho.matrix() - populations.matrix();
        Ok(CoherenceSplit {
            populations,
            coherences,
            basis: self.label().to_string(),
        })
    }
}

/// `ρ = 𝒫 + χ`.
#[derive(Debug, Clone)]
pub struct CoherenceSplit {
    pub populations: DensityOperator,
    pub coherences: ComplexMatrix,
    pub basis: String,
}

fn check_dim(rho: &DensityOperator, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.dim(),
        });
    }
    Ok(())
}

pub fn dephase(rho: &DensityOperator, basis: &Basis) -> Result<DensityOperator> {
    check_dim(rho, basis.dim())?;
    let coords = basis.to_coordinates(rho.matrix());
    let d = coords.dim();
    let mut diag = ComplexMatrix::zeros(d);
    for i in 0..d {
        diag[(i, i)] = coords[(i, i)].re.into();
    }
    Ok(DensityOperator::new_unchecked(basis.from_coordinates(&diag)))
}

/// `Σ_ℓ Π_ℓ ρ Π_ℓ`
pub fn dephase_sectors(rho: &DensityOperator, sectors: &SpectralDecomposition) -> Result<DensityOperator> {
    check_dim(rho, sectors.dim())?;
    let mut out = ComplexMatrix::zeros(rho.dim());
    for p in sectors.projectors() {
        out += &p.matmul(rho.matrix()).matmul(p);
    }
    Ok(DensityOperator::new_unchecked(out.hermitian_part()))
}

pub fn coherence_split(rho: &DensityOperator, basis: &Basis) -> Result<CoherenceSplit> {
    let populations = dephase(rho, basis)?;
    let coherences = rho.matrix() - populations.matrix();
    Ok(CoherenceSplit {
        populations,
        coherences,
        basis: basis.label().to_string(),
    })
}

/// `C_L1 = ½ Σ_{i≠j} |ρ_ij|` in `basis`.
pub fn coherence_l1(rho: &DensityOperator, basis: &Basis) -> Result<f64> {
    check_dim(rho, basis.dim())?;
    let coords = basis.to_coordinates(rho.matrix());
    let d = coords.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j && coords[(i, j)] != ZERO {
                s += coords[(i, j)].norm();
            }
        }
    }
    Ok(0.5 * s)
}
