//! Finite-shot emulation of the measurement protocols and bootstrap errors.

use super::joint::{tpm_conditionals, JointEnergyDistribution, MllDecomposition, Protocol};
use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::qcore::{DensityOperator, Dephasing, SpectralDecomposition};
use crate::sampling::SeededGenerator;

pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Recorded `(ℓ, k)` level indices of individual runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotOutcomes {
    pub protocol: Protocol,
    pub initial_energies: Vec<f64>,
    pub final_energies: Vec<f64>,
    pub outcomes: Vec<(usize, usize)>,
}

impl ShotOutcomes {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn delta(&self, shot: usize) -> f64 {
        let (l, k) = self.outcomes[shot];
        self.final_energies[k] - self.initial_energies[l]
    }

    pub fn deltas(&self) -> Vec<f64> {
        (0..self.len()).map(|s| self.delta(s)).collect()
    }

    /// Empirical frequencies.
    pub fn to_joint(&self) -> Result<JointEnergyDistribution> {
        let mut probs = vec![vec![0.0; self.final_energies.len()]; self.initial_energies.len()];
        let w = 1.0 / self.len() as f64;
        for &(l, k) in &self.outcomes {
            probs[l][k] += w;
        }
        JointEnergyDistribution::new(
            self.initial_energies.clone(),
            self.final_energies.clone(),
            probs,
            self.protocol,
        )
    }
}

/// A point estimate with its bootstrap standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// `|value − target| ≤ k·se`
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.se
    }
}

pub fn sample_shot_outcomes(
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
    protocol: Protocol,
    n_shots: usize,
    seed: u64,
) -> Result<ShotOutcomes> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
    }
    let mut gen = SeededGenerator::new(seed);
    let p_i = spec_i.level_weights(rho.matrix());
    let outcomes = match protocol {
        Protocol::Epm => {
            let p_f = spec_f.level_weights(&channel.apply_matrix(rho.matrix())?);
            (0..n_shots)
                .map(|_| {
                    let l = gen.categorical(&p_i);
                    (l, gen.categorical(&p_f))
                })
                .collect()
        }
        Protocol::Tpm => {
            let cond = tpm_conditionals(channel, spec_i, spec_f)?;
            (0..n_shots)
                .map(|_| {
                    let l = gen.categorical(&p_i);
                    (l, gen.categorical(&cond[l]))
                })
                .collect()
        }
        Protocol::Mll => {
            let dec = MllDecomposition::new(rho)?;
            let per_state = (0..dec.weights.len())
                .map(|s| {
                    let proj = dec.projector(s);
                    Ok((
                        spec_i.level_weights(&proj),
                        spec_f.level_weights(&channel.apply_matrix(&proj)?),
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            (0..n_shots)
                .map(|_| {
                    let s = gen.categorical(&dec.weights);
                    let l = gen.categorical(&per_state[s].0);
                    (l, gen.categorical(&per_state[s].1))
                })
                .collect()
        }
    };
    Ok(ShotOutcomes {
        protocol,
        initial_energies: spec_i.energies().to_vec(),
        final_energies: spec_f.energies().to_vec(),
        outcomes,
    })
}

/// Empirical joint from `n_shots` simulated runs; deterministic in `seed`.
pub fn sample_shots(
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
    protocol: Protocol,
    n_shots: usize,
    seed: u64,
) -> Result<JointEnergyDistribution> {
    sample_shot_outcomes(rho, channel, spec_i, spec_f, protocol, n_shots, seed)?.to_joint()
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn std_dev(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)).sqrt()
}

fn resample(x: &[f64], gen: &mut SeededGenerator) -> Vec<f64> {
    (0..x.len()).map(|_| x[gen.index(x.len())]).collect()
}

/// Sample mean of `values` with a bootstrap standard error.
pub fn bootstrap_mean(values: &[f64], resamples: usize, seed: u64) -> Estimate {
    let mut gen = SeededGenerator::new(seed);
    let stats: Vec<f64> = (0..resamples).map(|_| mean(&resample(values, &mut gen))).collect();
    Estimate {
        value: mean(values),
        se: std_dev(&stats),
    }
}

/// `⟨e^{−βΔE}⟩` over recorded shots.
pub fn estimate_exponential(shots: &ShotOutcomes, beta: f64, resamples: usize, seed: u64) -> Estimate {
    let v: Vec<f64> = shots.deltas().iter().map(|d| (-beta * d).exp()).collect();
    bootstrap_mean(&v, resamples, seed)
}

/// `⟨ΔE^n⟩` over recorded shots.
pub fn estimate_moment(shots: &ShotOutcomes, n: u32, resamples: usize, seed: u64) -> Estimate {
    let v: Vec<f64> = shots.deltas().iter().map(|d| d.powi(n as i32)).collect();
    bootstrap_mean(&v, resamples, seed)
}

/// Shot estimates of `𝒢_EPM(iβ)` and its population/coherence parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpmSplitEstimate {
    pub total: Estimate,
    pub diagonal: Estimate,
    pub coherence: Estimate,
}

/// Three independent groups of `n_shots` runs: initial energy on `ρ`, final
/// energy on `Φ[ρ]`, final energy on `Φ[𝒫]`. With `A = ⟨e^{βE_i}⟩`,
/// `B = ⟨e^{−βE_f}⟩_ρ` and `B_𝒫 = ⟨e^{−βE_f}⟩_𝒫`, the estimates are `AB`,
/// `AB_𝒫` and `A(B − B_𝒫)`. Requires `𝒫` to share `ρ`'s energy populations.
#[allow(clippy::too_many_arguments)]
pub fn epm_split_shots(
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
    dephasing: &Dephasing,
    beta: f64,
    n_shots: usize,
    seed: u64,
    resamples: usize,
) -> Result<EpmSplitEstimate> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
    }
    let split = dephasing.split(rho, spec_i)?;
    let root = SeededGenerator::new(seed);
    let p_i = spec_i.level_weights(rho.matrix());
    let p_f = spec_f.level_weights(&channel.apply_matrix(rho.matrix())?);
    let p_fp = spec_f.level_weights(&channel.apply_matrix(split.populations.matrix())?);

    let draw = |p: &[f64], energies: &[f64], sign: f64, stream: u64| -> Vec<f64> {
        let mut g = root.child(stream);
        (0..n_shots)
            .map(|_| (sign * beta * energies[g.categorical(p)]).exp())
            .collect()
    };
    let a = draw(&p_i, spec_i.energies(), 1.0, 0);
    let b = draw(&p_f, spec_f.energies(), -1.0, 1);
    let bp = draw(&p_fp, spec_f.energies(), -1.0, 2);

    let mut g = root.child(3);
    let mut totals = Vec::with_capacity(resamples);
    let mut diags = Vec::with_capacity(resamples);
    let mut cohs = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let (ma, mb, mbp) = (
            mean(&resample(&a, &mut g)),
            mean(&resample(&b, &mut g)),
            mean(&resample(&bp, &mut g)),
        );
        totals.push(ma * mb);
        diags.push(ma * mbp);
        cohs.push(ma * (mb - mbp));
    }
    let (ma, mb, mbp) = (mean(&a), mean(&b), mean(&bp));
    Ok(EpmSplitEstimate {
        total: Estimate {
            value: ma * mb,
            se: std_dev(&totals),
        },
        diagonal: Estimate {
            value: ma * mbp,
            se: std_dev(&diags),
        },
        coherence: Estimate {
            value: ma * (mb - mbp),
            se: std_dev(&cohs),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{joint, tv_distance_joint};
    use crate::qcore::ComplexMatrix;

    fn setup() -> (SpectralDecomposition, QuantumChannel) {
        let s = SpectralDecomposition::new(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
        let (c, sn) = (0.4f64.cos(), 0.4f64.sin());
        let u = ComplexMatrix::from_real_rows(&[&[c, -sn], &[sn, c]]);
        (s, QuantumChannel::unitary(u).unwrap())
    }

    #[test]
    fn deterministic_for_seed() {
        let (s, ch) = setup();
        let rho = DensityOperator::from_probabilities(&[0.3, 0.7]).unwrap();
        let a = sample_shot_outcomes(&rho, &ch, &s, &s, Protocol::Tpm, 100, 9).unwrap();
        let b = sample_shot_outcomes(&rho, &ch, &s, &s, Protocol::Tpm, 100, 9).unwrap();
        assert_eq!(a, b);
        assert!(sample_shots(&rho, &ch, &s, &s, Protocol::Tpm, 0, 9).is_err());
    }

    #[test]
    fn point_mass_shots_identical() {
        let s = SpectralDecomposition::new(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
        let rho = DensityOperator::from_probabilities(&[1.0, 0.0]).unwrap();
        let shots = sample_shot_outcomes(&rho, &QuantumChannel::identity(2), &s, &s, Protocol::Epm, 50, 1).unwrap();
        assert!(shots.outcomes.iter().all(|o| *o == shots.outcomes[0]));
    }

    #[test]
    fn converges_to_exact_joint() {
        let (s, ch) = setup();
        let rho = DensityOperator::from_probabilities(&[0.3, 0.7]).unwrap();
        for p in Protocol::ALL {
            let emp = sample_shots(&rho, &ch, &s, &s, p, 200_000, 4).unwrap();
            let exact = joint(p, &rho, &ch, &s, &s).unwrap();
            assert!(tv_distance_joint(&emp, &exact).unwrap() < 5e-3);
        }
    }

    #[test]
    fn bootstrap_se_tracks_standard_error() {
        let mut g = SeededGenerator::new(2);
        let x: Vec<f64> = (0..4000).map(|_| g.normal()).collect();
        let e = bootstrap_mean(&x, BOOTSTRAP_RESAMPLES, 3);
        let analytic = std_dev(&x) / (x.len() as f64).sqrt();
        assert!((e.se / analytic - 1.0).abs() < 0.2);
    }
}
