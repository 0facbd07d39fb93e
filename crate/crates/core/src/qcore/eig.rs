//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` and then applies
//! the real symmetric Jacobi rotation, so the combined column transform on the
//! `(p, q)` plane is
//!
//! ```text
//!   G = [ c            s           ]
//!       [ -s e^{-iφ}   c e^{-iφ}   ]      with a_pq = |a_pq| e^{iφ}
//! ```
//!
//! and `A <- G^† A G`, `V <- V G`.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigConfig {
    /// Maximum tolerated `|M - M^†|` entry.
    pub hermitian_tol: f64,
    /// Convergence threshold on the off-diagonal Frobenius norm, applied
    /// relative to `max(1, ‖M‖_F)`.
    pub offdiag_tol: f64,
    pub max_sweeps: usize,
}

impl Default for EigConfig {
    fn default() -> Self {
        Self {
            hermitian_tol: 1e-10,
            offdiag_tol: 1e-12,
            max_sweeps: 100,
        }
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.vectors.column(j)
    }

    /// `Σ_j λ_j v_j v_j^†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.vectors.dim();
        let mut m = ComplexMatrix::zeros(d);
        for (j, &lam) in self.values.iter().enumerate() {
            let v = self.vector(j);
            m += &ComplexMatrix::outer(&v, &v).scale_real(lam);
        }
        m
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Eigen> {
    hermitian_eig_with(m, &EigConfig::default())
}

pub fn hermitian_eig_with(m: &ComplexMatrix, cfg: &EigConfig) -> Result<Eigen> {
    let deviation = m.hermiticity_deviation();
    if !(deviation <= cfg.hermitian_tol) {
        return Err(Error::NonHermitianInput { deviation });
    }
    let d = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(d);
    let threshold = cfg.offdiag_tol * a.frobenius_norm().max(1.0);

    let mut converged = off_diagonal_norm(&a) < threshold;
    let mut sweeps = 0;
    while !converged && sweeps < cfg.max_sweeps {
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) < threshold;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            off_norm: off_diagonal_norm(&a),
        });
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));

    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(d);
    for (new_j, &old_j) in order.iter().enumerate() {
        vectors.set_column(new_j, &v.column(old_j));
    }
    Ok(Eigen { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / r; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let ph_conj = phase.conj();
    let g00 = C64::new(c, 0.0);
    let g01 = C64::new(s, 0.0);
    let g10 = ph_conj * (-s);
    let g11 = ph_conj * c;

    let d = a.dim();
    // A <- A G
    for k in 0..d {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g00 + akq * g10;
        a[(k, q)] = akp * g01 + akq * g11;
    }
    // A <- G^† A
    for k in 0..d {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g00.conj() * apk + g10.conj() * aqk;
        a[(q, k)] = g01.conj() * apk + g11.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V <- V G
    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g00 + vkq * g10;
        v[(k, q)] = vkp * g01 + vkq * g11;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::inner;

    fn check_eigenpairs(m: &ComplexMatrix, e: &Eigen) {
        let scale = m.frobenius_norm().max(1.0);
        for j in 0..m.dim() {
            let vj = e.vector(j);
            let mv = m.mul_vec(&vj);
            for (x, y) in mv.iter().zip(&vj) {
                assert!((x - y * e.values[j]).norm() < 1e-9 * scale);
            }
            for k in 0..m.dim() {
                let ip = inner(&vj, &e.vector(k));
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((ip - C64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_input_sorted() {
        let m = ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let e = hermitian_eig(&m).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        // permutation eigenvectors: e_1, e_2, e_0
        assert_eq!(e.vectors[(1, 0)].re, 1.0);
        assert_eq!(e.vectors[(2, 1)].re, 1.0);
        assert_eq!(e.vectors[(0, 2)].re, 1.0);
        check_eigenpairs(&m, &e);
    }

    #[test]
    fn pauli_x() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = hermitian_eig(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // up to a global phase
        let minus = e.vector(0);
        let plus = e.vector(1);
        assert!((inner(&[C64::new(h, 0.0), C64::new(-h, 0.0)], &minus).norm() - 1.0).abs() < 1e-12);
        assert!((inner(&[C64::new(h, 0.0), C64::new(h, 0.0)], &plus).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_phases() {
        // Pauli y has purely imaginary off-diagonals.
        let m = ComplexMatrix::from_row_major(vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO]);
        let e = hermitian_eig(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        check_eigenpairs(&m, &e);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn sweep_cap_reports_no_convergence() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.5, 0.2], &[0.5, 2.0, 0.1], &[0.2, 0.1, 3.0]]);
        let cfg = EigConfig {
            max_sweeps: 0,
            ..EigConfig::default()
        };
        assert!(matches!(hermitian_eig_with(&m, &cfg), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn reconstruction_random_5x5() {
        let mut gen = crate::sampling::SeededGenerator::new(5);
        let m = crate::sampling::random_hermitian(5, &mut gen);
        let e = hermitian_eig(&m).unwrap();
        assert!(e.reconstruct().max_abs_diff(&m) < 1e-9);
        check_eigenpairs(&m, &e);
    }

    #[test]
    fn degenerate_spectrum() {
        let m = ComplexMatrix::from_real_diagonal(&[2.0, 0.0, 0.0, -2.0]);
        let e = hermitian_eig(&m).unwrap();
        assert_eq!(e.values, vec![-2.0, 0.0, 0.0, 2.0]);
    }
}
