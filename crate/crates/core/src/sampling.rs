//! Seeded random states, coherences, unitaries and channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::qcore::{hermitian_eig, ComplexMatrix, DensityOperator, C64};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Populations at or below this are treated as empty when building coherences.
pub const EMPTY_POPULATION: f64 = 1e-14;

/// A reproducible random stream. Child streams are derived from the root seed
/// so that parallel ensembles do not depend on scheduling order.
#[derive(Debug, Clone)]
pub struct SeededGenerator {
    seed: u64,
    rng: ChaCha20Rng,
}

impl SeededGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for sub-stream `stream`.
    pub fn child(&self, stream: u64) -> Self {
        Self::new(child_seed(self.seed, stream))
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Complex Gaussian with unit variance per component.
    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Index drawn from a discrete distribution (weights need not be normalised).
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let r = self.uniform() * total;
        let mut acc = 0.0;
        let mut last = 0;
        for (i, w) in weights.iter().enumerate() {
            if *w <= 0.0 {
                continue;
            }
            acc += w;
            last = i;
            if r < acc {
                return i;
            }
        }
        last
    }
}

pub fn child_seed(seed: u64, stream: u64) -> u64 {
    seed ^ stream.wrapping_add(1).wrapping_mul(GOLDEN)
}

fn ginibre(rows: usize, cols: usize, gen: &mut SeededGenerator) -> Vec<Vec<C64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| gen.complex_normal()).collect())
        .collect()
}

/// Haar-random pure state vector.
pub fn haar_random_pure(dim: usize, gen: &mut SeededGenerator) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gen.complex_normal()).collect();
        let n = crate::qcore::vec_norm(&v);
        if n > 1e-300 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// `G G^† / Tr(G G^†)` with `G` a `dim × rank` Ginibre matrix. `rank = dim`
/// gives the Hilbert-Schmidt ensemble.
pub fn random_density(dim: usize, rank: usize, gen: &mut SeededGenerator) -> Result<DensityOperator> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(format!("rank {rank} for dimension {dim}")));
    }
    let g = ginibre(dim, rank, gen);
    let mut m = ComplexMatrix::from_fn(dim, |i, j| (0..rank).map(|k| g[i][k] * g[j][k].conj()).sum());
    let tr = m.trace().re;
    m = m.scale_real(1.0 / tr).hermitian_part();
    Ok(DensityOperator::new_unchecked(m))
}

/// Random GUE-like Hermitian matrix.
pub fn random_hermitian(dim: usize, gen: &mut SeededGenerator) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| gen.complex_normal());
    g.hermitian_part()
}

/// Haar-random unitary from a QR decomposition of a Ginibre matrix.
pub fn random_unitary(dim: usize, gen: &mut SeededGenerator) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| gen.complex_normal());
    let mut q = ComplexMatrix::zeros(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for k in 0..j {
            let qk = q.column(k);
            let proj = crate::qcore::inner(&qk, &v);
            for (x, y) in v.iter_mut().zip(&qk) {
                *x -= proj * y;
            }
        }
        let n = crate::qcore::vec_norm(&v);
        // R_jj = n is real and positive, so no extra phase fix is needed.
        for x in &mut v {
            *x /= n;
        }
        q.set_column(j, &v);
    }
    q
}

/// Random CPTP map with `n_kraus` Kraus operators, `K_i = G_i (Σ G^†G)^{-1/2}`.
pub fn random_channel(dim: usize, n_kraus: usize, gen: &mut SeededGenerator) -> Result<QuantumChannel> {
    if n_kraus == 0 {
        return Err(Error::InvalidArgument("need at least one Kraus operator".into()));
    }
    let gs: Vec<ComplexMatrix> = (0..n_kraus)
        .map(|_| ComplexMatrix::from_fn(dim, |_, _| gen.complex_normal()))
        .collect();
    let mut a = ComplexMatrix::zeros(dim);
    for g in &gs {
        a += &g.adjoint().matmul(g);
    }
    let eig = hermitian_eig(&a)?;
    let inv_sqrt = ComplexMatrix::from_real_diagonal(&eig.values.iter().map(|v| 1.0 / v.sqrt()).collect::<Vec<_>>())
        .conjugate_by(&eig.vectors);
    let kraus: Vec<ComplexMatrix> = gs.iter().map(|g| g.matmul(&inv_sqrt)).collect();
    QuantumChannel::from_kraus(&kraus)
}

/// Random Hermitian, traceless-off-diagonal perturbation `χ` such that
/// `populations + χ` stays positive semidefinite.
///
/// `populations` is diagonal in the coordinates supplied; `scale` caps the
/// Frobenius norm of `χ`. The returned amplitude is the largest multiple of a
/// random direction (found by bisection) that keeps the sum PSD.
pub fn random_coherence(populations: &[f64], scale: f64, gen: &mut SeededGenerator) -> Result<ComplexMatrix> {
    let d = populations.len();
    let mut dir = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in (i + 1)..d {
            if populations[i] > EMPTY_POPULATION && populations[j] > EMPTY_POPULATION {
                let z = gen.complex_normal();
                dir[(i, j)] = z;
                dir[(j, i)] = z.conj();
            }
        }
    }
    let n = dir.frobenius_norm();
    if n == 0.0 || !(scale > 0.0) {
        log::warn!("no coherence can be added to these populations; returning zero");
        return Ok(ComplexMatrix::zeros(d));
    }
    dir = dir.scale_real(1.0 / n);
    let base = ComplexMatrix::from_real_diagonal(populations);
    let psd = |c: f64| -> Result<bool> {
        let m = &base + &dir.scale_real(c);
        Ok(hermitian_eig(&m)?.values[0] >= 0.0)
    };
    if psd(scale)? {
        return Ok(dir.scale_real(scale));
    }
    let (mut lo, mut hi) = (0.0, scale);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if psd(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(dir.scale_real(lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<f64> = {
            let mut g = SeededGenerator::new(7);
            (0..5).map(|_| g.uniform()).collect()
        };
        let mut g = SeededGenerator::new(7);
        let b: Vec<f64> = (0..5).map(|_| g.uniform()).collect();
        assert_eq!(a, b);
        assert_ne!(child_seed(7, 0), child_seed(7, 1));
    }

    #[test]
    fn random_density_is_state() {
        let mut g = SeededGenerator::new(3);
        for rank in 1..=3 {
            let rho = random_density(3, rank, &mut g).unwrap();
            assert!(DensityOperator::new(rho.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut g = SeededGenerator::new(11);
        let u = random_unitary(4, &mut g);
        assert!(u.adjoint().matmul(&u).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn coherence_keeps_positivity() {
        let mut g = SeededGenerator::new(5);
        let pops = [0.6, 0.3, 0.1];
        for _ in 0..20 {
            let chi = random_coherence(&pops, 1.0, &mut g).unwrap();
            let rho = &ComplexMatrix::from_real_diagonal(&pops) + &chi;
            assert!(hermitian_eig(&rho).unwrap().values[0] > -1e-12);
            for i in 0..3 {
                assert_eq!(chi[(i, i)].norm(), 0.0);
            }
        }
    }

    #[test]
    fn coherence_skips_empty_levels() {
        let mut g = SeededGenerator::new(5);
        let chi = random_coherence(&[1.0, 0.0], 1.0, &mut g).unwrap();
        assert_eq!(chi.max_abs(), 0.0);
    }

    #[test]
    fn categorical_respects_zero_weights() {
        let mut g = SeededGenerator::new(1);
        for _ in 0..200 {
            assert_eq!(g.categorical(&[0.0, 1.0, 0.0]), 1);
        }
    }
}
