use std::fmt;
use std::str::FromStr;

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::qcore::{hermitian_eig, ComplexMatrix, DensityOperator, SpectralDecomposition, C64};

/// Probabilities in `[−CLAMP_TOL, 0)` are rounding noise and are set to zero.
pub const CLAMP_TOL: f64 = 1e-12;
/// Allowed deviation of a joint's total mass from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Eigenvalues of `ρ_i` below this are dropped from the MLL decomposition.
pub const MLL_EIGENVALUE_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// End-point measurement: initial and final energies measured on independent copies.
    Epm,
    /// Two-point measurement: projective energy measurements before and after.
    Tpm,
    /// Measurement in the eigenbasis of `ρ_i` followed by a final energy measurement.
    Mll,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Epm, Protocol::Tpm, Protocol::Mll];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Epm => "EPM",
            Self::Tpm => "TPM",
            Self::Mll => "MLL",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "epm" => Ok(Self::Epm),
            "tpm" => Ok(Self::Tpm),
            "mll" => Ok(Self::Mll),
            _ => Err(Error::InvalidArgument(format!("unknown protocol '{s}'"))),
        }
    }
}

/// `p[ℓ][k]`: probability of initial level `ℓ` and final level `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEnergyDistribution {
    initial_energies: Vec<f64>,
    final_energies: Vec<f64>,
    probs: Vec<Vec<f64>>,
    protocol: Protocol,
}

impl JointEnergyDistribution {
    /// Validates, clamps rounding negatives and renormalises.
    pub fn new(
        initial_energies: Vec<f64>,
        final_energies: Vec<f64>,
        mut probs: Vec<Vec<f64>>,
        protocol: Protocol,
    ) -> Result<Self> {
        if probs.len() != initial_energies.len() {
            return Err(Error::DimensionMismatch {
                expected: initial_energies.len(),
                found: probs.len(),
            });
        }
        let mut total = 0.0;
        for row in &mut probs {
            if row.len() != final_energies.len() {
                return Err(Error::DimensionMismatch {
                    expected: final_energies.len(),
                    found: row.len(),
                });
            }
            for p in row.iter_mut() {
                *p = clamp_probability(*p)?;
                total += *p;
            }
        }
        if !((total - 1.0).abs() <= NORMALIZATION_TOL) {
            return Err(Error::InvalidArgument(format!("joint distribution sums to {total}")));
        }
        for row in &mut probs {
            for p in row.iter_mut() {
                *p /= total;
            }
        }
        Ok(Self {
            initial_energies,
            final_energies,
            probs,
            protocol,
        })
    }

    /// `p_i^ℓ p_f^k`
    pub fn product(
        spec_i: &SpectralDecomposition,
        p_i: &[f64],
        spec_f: &SpectralDecomposition,
        p_f: &[f64],
        protocol: Protocol,
    ) -> Result<Self> {
        let probs = p_i.iter().map(|a| p_f.iter().map(|b| a * b).collect()).collect();
        Self::new(spec_i.energies().to_vec(), spec_f.energies().to_vec(), probs, protocol)
    }

    pub fn initial_energies(&self) -> &[f64] {
        &self.initial_energies
    }

    pub fn final_energies(&self) -> &[f64] {
        &self.final_energies
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn get(&self, l: usize, k: usize) -> f64 {
        self.probs[l][k]
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.initial_energies.len(), self.final_energies.len())
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().flatten().sum()
    }

    pub fn initial_marginal(&self) -> Vec<f64> {
        self.probs.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn final_marginal(&self) -> Vec<f64> {
        (0..self.final_energies.len())
            .map(|k| self.probs.iter().map(|r| r[k]).sum())
            .collect()
    }

    /// Product of this distribution's own marginals.
    pub fn marginal_product(&self) -> Result<Self> {
        let a = self.initial_marginal();
        let b = self.final_marginal();
        let probs = a.iter().map(|x| b.iter().map(|y| x * y).collect()).collect();
        Self::new(
            self.initial_energies.clone(),
            self.final_energies.clone(),
            probs,
            self.protocol,
        )
    }

    /// `Σ_ℓk p[ℓ][k] f(E_i^ℓ, E_f^k)`
    pub fn expectation(&self, f: impl Fn(f64, f64) -> C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (ei, row) in self.initial_energies.iter().zip(&self.probs) {
            for (ef, p) in self.final_energies.iter().zip(row) {
                if *p != 0.0 {
                    s += f(*ei, *ef) * *p;
                }
            }
        }
        s
    }

    /// `a·self + (1 − a)·other` on identical energy axes.
    pub fn mix(&self, a: f64, other: &Self) -> Result<Self> {
        self.check_axes(other)?;
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(r, s)| r.iter().zip(s).map(|(x, y)| a * x + (1.0 - a) * y).collect())
            .collect();
        Self::new(
            self.initial_energies.clone(),
            self.final_energies.clone(),
            probs,
            self.protocol,
        )
    }

    pub(crate) fn check_axes(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.probs.len() * self.final_energies.len(),
                found: other.probs.len() * other.final_energies.len(),
            });
        }
        let same = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .all(|(x, y)| (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())))
        };
        if !same(&self.initial_energies, &other.initial_energies) || !same(&self.final_energies, &other.final_energies)
        {
            return Err(Error::InvalidArgument(
                "joint distributions have different energy axes".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn clamp_probability(p: f64) -> Result<f64> {
    if !p.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite probability {p}")));
    }
    if p >= 0.0 {
        Ok(p)
    } else if p >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::NegativeProbability { value: p })
    }
}

fn check_dims(
    rho: &ComplexMatrix,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
) -> Result<()> {
    let d = rho.dim();
    for found in [channel.dim(), spec_i.dim(), spec_f.dim()] {
        if found != d {
            return Err(Error::DimensionMismatch { expected: d, found });
        }
    }
    Ok(())
}

/// `p_i^ℓ = Tr(ρ Π_ℓ)`
pub fn initial_probabilities(rho: &DensityOperator, spec_i: &SpectralDecomposition) -> Result<Vec<f64>> {
    if rho.dim() != spec_i.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec_i.dim(),
            found: rho.dim(),
        });
    }
    spec_i
        .level_weights(rho.matrix())
        .into_iter()
        .map(clamp_probability)
        .collect()
}

pub fn epm_joint(
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
) -> Result<JointEnergyDistribution> {
    check_dims(rho.matrix(), channel, spec_i, spec_f)?;
    let p_i = spec_i.level_weights(rho.matrix());
    let p_f = spec_f.level_weights(&channel.apply_matrix(rho.matrix())?);
    JointEnergyDistribution::product(spec_i, &p_i, spec_f, &p_f, Protocol::Epm)
}

/// `q[ℓ][k] = Tr(Φ[Π_ℓ / rank] Π_f^k)`: final-level distribution after initial outcome `ℓ`.
pub fn tpm_conditionals(
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
) -> Result<Vec<Vec<f64>>> {
    (0..spec_i.len())
        .map(|l| Ok(spec_f.level_weights(&channel.apply_matrix(&spec_i.normalized_projector(l))?)))
        .collect()
}

pub fn tpm_joint(
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
) -> Result<JointEnergyDistribution> {
    check_dims(rho.matrix(), channel, spec_i, spec_f)?;
    let p_i = spec_i.level_weights(rho.matrix());
    let cond = tpm_conditionals(channel, spec_i, spec_f)?;
    let probs = p_i
        .iter()
        .zip(&cond)
        .map(|(p, row)| row.iter().map(|q| p * q).collect())
        .collect();
    JointEnergyDistribution::new(
        spec_i.energies().to_vec(),
        spec_f.energies().to_vec(),
        probs,
        Protocol::Tpm,
    )
}

/// `ρ = Σ_s p_s |s><s|` restricted to `p_s ≥` [`MLL_EIGENVALUE_CUTOFF`].
#[derive(Debug, Clone)]
pub struct MllDecomposition {
    pub weights: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
    /// Repeated nonzero eigenvalues make the eigenbasis, and hence MLL, ambiguous.
    pub degenerate: bool,
}

impl MllDecomposition {
    pub fn new(rho: &DensityOperator) -> Result<Self> {
        let eig = hermitian_eig(rho.matrix())?;
        let mut weights = Vec::new();
        let mut vectors = Vec::new();
        for (j, &w) in eig.values.iter().enumerate() {
            if w >= MLL_EIGENVALUE_CUTOFF {
                weights.push(w);
                vectors.push(eig.vector(j));
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let degenerate = weights.windows(2).any(|p| (p[1] - p[0]).abs() < 1e-10);
        if degenerate {
            log::warn!("state has repeated nonzero eigenvalues; MLL eigenbasis is not unique");
        }
        Ok(Self {
            weights,
            vectors,
            degenerate,
        })
    }

    pub fn projector(&self, s: usize) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vectors[s], &self.vectors[s])
    }
}

pub fn mll_joint(
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
) -> Result<JointEnergyDistribution> {
    check_dims(rho.matrix(), channel, spec_i, spec_f)?;
    let dec = MllDecomposition::new(rho)?;
    let mut probs = vec![vec![0.0; spec_f.len()]; spec_i.len()];
    for (s, &w) in dec.weights.iter().enumerate() {
        let proj = dec.projector(s);
        let a = spec_i.level_weights(&proj);
        let b = spec_f.level_weights(&channel.apply_matrix(&proj)?);
        for (l, row) in probs.iter_mut().enumerate() {
            for (k, p) in row.iter_mut().enumerate() {
                *p += w * a[l] * b[k];
            }
        }
    }
    JointEnergyDistribution::new(
        spec_i.energies().to_vec(),
        spec_f.energies().to_vec(),
        probs,
        Protocol::Mll,
    )
}

pub fn joint(
    protocol: Protocol,
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
) -> Result<JointEnergyDistribution> {
    match protocol {
        Protocol::Epm => epm_joint(rho, channel, spec_i, spec_f),
        Protocol::Tpm => tpm_joint(rho, channel, spec_i, spec_f),
        Protocol::Mll => mll_joint(rho, channel, spec_i, spec_f),
    }
}

/// Runs EPM once per normalised eigenprojector input and mixes the results
/// with weights `p_i^ℓ`; the mixture is the TPM joint.
pub fn tpm_recovery(
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
) -> Result<JointEnergyDistribution> {
    check_dims(rho.matrix(), channel, spec_i, spec_f)?;
    let p_i = spec_i.level_weights(rho.matrix());
    let mut probs = vec![vec![0.0; spec_f.len()]; spec_i.len()];
    for (l, &w) in p_i.iter().enumerate() {
        let input = DensityOperator::new_unchecked(spec_i.normalized_projector(l));
        let run = epm_joint(&input, channel, spec_i, spec_f)?;
        for (acc, row) in probs.iter_mut().zip(run.probs()) {
            for (a, p) in acc.iter_mut().zip(row) {
                *a += w * p;
            }
        }
    }
    JointEnergyDistribution::new(
        spec_i.energies().to_vec(),
        spec_f.energies().to_vec(),
        probs,
        Protocol::Tpm,
    )
}
