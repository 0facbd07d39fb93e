use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// An orthonormal basis, stored as the columns of a unitary matrix.
#[derive(Debug, Clone)]
pub struct Basis {
    vectors: ComplexMatrix,
    label: String,
}

impl Basis {
    pub fn computational(dim: usize) -> Self {
        Self {
            vectors: ComplexMatrix::identity(dim),
            label: "computational".to_string(),
        }
    }

    pub fn from_columns(vectors: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        let gram = vectors.adjoint().matmul(&vectors);
        let deviation = gram.max_abs_diff(&ComplexMatrix::identity(vectors.dim()));
        if !(deviation <= ORTHONORMALITY_TOL) {
            return Err(Error::NonOrthonormalBasis { deviation });
        }
        Ok(Self {
            vectors,
            label: label.into(),
        })
    }

    pub(crate) fn from_unitary_unchecked(vectors: ComplexMatrix, label: &str) -> Self {
        Self {
            vectors,
            label: label.to_string(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    pub fn is_computational(&self) -> bool {
        self.vectors.max_abs_diff(&ComplexMatrix::identity(self.dim())) == 0.0
    }

    /// Matrix elements in this basis: `B^† M B`.
    pub fn to_coordinates(&self, m: &ComplexMatrix) -> ComplexMatrix {
        if self.is_computational() {
            return m.clone();
        }
        self.vectors.adjoint().matmul(m).matmul(&self.vectors)
    }

    /// Inverse of [`to_coordinates`](Self::to_coordinates): `B X B^†`.
    pub fn from_coordinates(&self, x: &ComplexMatrix) -> ComplexMatrix {
        if self.is_computational() {
            return x.clone();
        }
        x.conjugate_by(&self.vectors)
    }
}
