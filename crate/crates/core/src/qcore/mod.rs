//! Dense complex linear algebra on small Hilbert spaces.

mod basis;
mod coherence;
mod density;
mod eig;
mod matrix;
mod spectral;

pub use basis::{Basis, ORTHONORMALITY_TOL};
pub use coherence::{coherence_l1, coherence_split, dephase, dephase_sectors, CoherenceSplit, Dephasing};
pub use density::{DensityOperator, DensityTolerances};
pub use eig::{hermitian_eig, hermitian_eig_with, EigConfig, Eigen};
pub use matrix::{inner, vec_norm, ComplexMatrix, C64, I, ONE, ZERO};
pub use spectral::{matrix_phase_exp, SpectralDecomposition, DEFAULT_GROUPING_FACTOR};
