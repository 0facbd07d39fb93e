//! CPTP maps: unitary conjugation, explicit superoperators and Lindblad
//! propagators.
//!
//! Superoperators act on column-major vectorised matrices, under which
//! `ρ ↦ UρU†` is `conj(U) ⊗ U`.

mod lindblad;

pub use lindblad::{
    lindblad_rhs, liouvillian, propagate, propagate_hermitian, Amplitude, ConvergenceReport, DriveTerm,
    HamiltonianSchedule, JumpOperator, JumpOperatorSet, LindbladPropagator, DEFAULT_STEP, HERMITIAN_TOL,
    TRACE_FAILURE_TOL,
};

use crate::error::{Error, Result};
use crate::qcore::{hermitian_eig, ComplexMatrix, DensityOperator};

pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub enum QuantumChannel {
    Unitary(ComplexMatrix),
    Superoperator { dim: usize, matrix: ComplexMatrix },
    Lindblad(LindbladPropagator),
}

impl QuantumChannel {
    pub fn identity(dim: usize) -> Self {
        Self::Unitary(ComplexMatrix::identity(dim))
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        let deviation = u.adjoint().matmul(&u).max_abs_diff(&ComplexMatrix::identity(u.dim()));
        if !(deviation <= UNITARITY_TOL) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not unitary (deviation {deviation:e})"
            )));
        }
        Ok(Self::Unitary(u))
    }

    pub fn superoperator(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.dim();
        let dim = (n as f64).sqrt().round() as usize;
        if dim * dim != n {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: n,
            });
        }
        Ok(Self::Superoperator { dim, matrix })
    }

    /// `S = Σ_i conj(K_i) ⊗ K_i`
    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let d = first.dim();
        let mut s = ComplexMatrix::zeros(d * d);
        for k in kraus {
            if k.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: k.dim(),
                });
            }
            s += &k.conj().kron(k);
        }
        Ok(Self::Superoperator { dim: d, matrix: s })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Unitary(u) => u.dim(),
            Self::Superoperator { dim, .. } => *dim,
            Self::Lindblad(p) => p.dim(),
        }
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_dim(rho.dim())?;
        match self {
            Self::Lindblad(p) => p.apply(rho),
            _ => Ok(DensityOperator::new_unchecked(
                self.apply_matrix(rho.matrix())?.hermitian_part(),
            )),
        }
    }

    /// Linear extension of the channel to arbitrary matrices.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(x.dim())?;
        match self {
            Self::Unitary(u) => Ok(x.conjugate_by(u)),
            Self::Superoperator { matrix, .. } => Ok(ComplexMatrix::unvectorize(&matrix.mul_vec(&x.vectorize()))),
            Self::Lindblad(p) => p.apply_matrix(x),
        }
    }

    /// The Heisenberg-picture adjoint `Φ†`, defined by `Tr(A Φ[X]) = Tr(Φ†[A] X)`.
    pub fn adjoint_matrix(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(a.dim())?;
        match self {
            Self::Unitary(u) => Ok(u.adjoint().matmul(a).matmul(u)),
            _ => {
                let s = self.superoperator_matrix()?;
                Ok(ComplexMatrix::unvectorize(&s.adjoint().mul_vec(&a.vectorize())))
            }
        }
    }

    /// The `d² × d²` matrix of the channel.
    pub fn superoperator_matrix(&self) -> Result<ComplexMatrix> {
        match self {
            Self::Unitary(u) => Ok(unitary_superoperator(u)),
            Self::Superoperator { matrix, .. } => Ok(matrix.clone()),
            Self::Lindblad(p) => p.superoperator(),
        }
    }
}

/// `conj(U) ⊗ U`
pub fn unitary_superoperator(u: &ComplexMatrix) -> ComplexMatrix {
    u.conj().kron(u)
}

/// Assembles the superoperator by sending every matrix unit through the channel.
pub fn channel_as_superoperator(channel: &QuantumChannel) -> Result<QuantumChannel> {
    let d = channel.dim();
    let mut s = ComplexMatrix::zeros(d * d);
    match channel {
        QuantumChannel::Lindblad(p) => s = p.superoperator()?,
        _ => {
            for i in 0..d {
                for j in 0..d {
                    let out = channel.apply_matrix(&ComplexMatrix::unit(d, i, j))?.vectorize();
                    s.set_column(i + d * j, &out);
                }
            }
        }
    }
    Ok(QuantumChannel::Superoperator { dim: d, matrix: s })
}

/// `C[i·d + a, j·d + b] = Φ(|i><j|)_{ab}`
pub fn choi_matrix(s: &ComplexMatrix) -> ComplexMatrix {
    let d = (s.dim() as f64).sqrt().round() as usize;
    ComplexMatrix::from_fn(d * d, |r, c| {
        let (i, a) = (r / d, r % d);
        let (j, b) = (c / d, c % d);
        s[(a + d * b, i + d * j)]
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    pub trace_preserving: bool,
    /// Worst violation of `Tr Φ(|i><j|) = δ_ij`.
    pub trace_defect: f64,
    pub choi_min_eig: f64,
    pub completely_positive: bool,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.trace_preserving && self.completely_positive
    }
}

pub fn check_cptp(s: &ComplexMatrix, tol: f64) -> Result<CptpReport> {
    let d = (s.dim() as f64).sqrt().round() as usize;
    if d * d != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: s.dim(),
        });
    }
    let trace_defect = lindblad::trace_defect(s, d);
    let choi = choi_matrix(s);
    let choi_min_eig = hermitian_eig(&choi.hermitian_part())?.values[0];
    Ok(CptpReport {
        trace_preserving: trace_defect <= tol,
        trace_defect,
        choi_min_eig,
        completely_positive: choi_min_eig >= -tol,
    })
}
