//! Characteristic functions, Jarzynski functionals and the second-moment split.

use super::joint::{MllDecomposition, Protocol};
use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, DensityOperator, Dephasing, SpectralDecomposition, C64, I};

/// Tolerance on `|𝒫 − ρ_th|` beyond which a Jarzynski report is flagged non-thermal.
pub const THERMAL_DIAGONAL_TOL: f64 = 1e-8;

/// `Tr(e^{−iuH_i} X)` and `Tr(e^{iuH_f} Y)` factors.
struct Exponentials {
    initial: ComplexMatrix,
    final_: ComplexMatrix,
}

impl Exponentials {
    fn new(spec_i: &SpectralDecomposition, spec_f: &SpectralDecomposition, u: C64) -> Self {
        Self {
            initial: spec_i.exp_scaled(-I * u),
            final_: spec_f.exp_scaled(I * u),
        }
    }
}

/// `𝒢(u) = ⟨e^{iuΔE}⟩` from operator traces.
pub fn characteristic_function(
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
    u: C64,
    protocol: Protocol,
) -> Result<C64> {
    let ex = Exponentials::new(spec_i, spec_f, u);
    match protocol {
        Protocol::Epm => {
            let a = ex.initial.trace_product(rho.matrix());
            let b = ex.final_.trace_product(&channel.apply_matrix(rho.matrix())?);
            Ok(a * b)
        }
        Protocol::Tpm => {
            let p = spec_i.level_weights(rho.matrix());
            let mut g = C64::new(0.0, 0.0);
            for (l, (&e, &w)) in spec_i.energies().iter().zip(&p).enumerate() {
                if w == 0.0 {
                    continue;
                }
                let out = channel.apply_matrix(&spec_i.normalized_projector(l))?;
                g += (-I * u * e).exp() * w * ex.final_.trace_product(&out);
            }
            Ok(g)
        }
        Protocol::Mll => {
            let dec = MllDecomposition::new(rho)?;
            let mut g = C64::new(0.0, 0.0);
            for (s, &w) in dec.weights.iter().enumerate() {
                let proj = dec.projector(s);
                let a = ex.initial.trace_product(&proj);
                let b = ex.final_.trace_product(&channel.apply_matrix(&proj)?);
                g += a * b * w;
            }
            Ok(g)
        }
    }
}

/// `ρ = 𝒫 + χ` contributions to the EPM characteristic function:
/// `𝒢_𝒫 = Tr(e^{−iuH_i}𝒫) Tr(e^{iuH_f}Φ[𝒫])`, `𝒢_χ = Tr(e^{−iuH_i}𝒫) Tr(e^{iuH_f}Φ[χ])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicSplit {
    pub population: C64,
    pub coherence: C64,
}

impl CharacteristicSplit {
    pub fn total(&self) -> C64 {
        self.population + self.coherence
    }
}

pub fn characteristic_split(
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
    u: C64,
    dephasing: &Dephasing,
) -> Result<CharacteristicSplit> {
    let split = dephasing.split(rho, spec_i)?;
    let ex = Exponentials::new(spec_i, spec_f, u);
    let a = ex.initial.trace_product(split.populations.matrix());
    let bp = ex
        .final_
        .trace_product(&channel.apply_matrix(split.populations.matrix())?);
    let bc = ex.final_.trace_product(&channel.apply_matrix(&split.coherences)?);
    Ok(CharacteristicSplit {
        population: a * bp,
        coherence: a * bc,
    })
}

/// `e^{βΔF} 𝒢(iβ)` split into the thermal-diagonal and coherence parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JarzynskiReport {
    /// `𝒢_EPM(iβ) Z_i / Z_f`
    pub total: f64,
    /// `d·Tr(ρ_f^th Φ[ρ_i^th])`
    pub diagonal_part: f64,
    /// `d·Tr(ρ_f^th Φ[χ])`
    pub coherence_part: f64,
    pub beta: f64,
    /// `−β⁻¹ ln(Z_f / Z_i)`
    pub delta_f: f64,
    /// `max|𝒫 − ρ_i^th|`; the decomposition assumes it vanishes.
    pub thermal_deviation: f64,
}

impl JarzynskiReport {
    pub fn is_thermal(&self) -> bool {
        self.thermal_deviation <= THERMAL_DIAGONAL_TOL
    }
}

/// Gibbs state `e^{−βH}/Z` and its partition function.
pub fn gibbs_state(spec: &SpectralDecomposition, beta: f64) -> (DensityOperator, f64) {
    let w = spec.exp_scaled(C64::new(-beta, 0.0));
    let z = w.trace().re;
    (DensityOperator::new_unchecked(w.scale_real(1.0 / z)), z)
}

pub fn jarzynski(
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
    beta: f64,
    dephasing: &Dephasing,
) -> Result<JarzynskiReport> {
    if !beta.is_finite() || beta == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "beta must be finite and nonzero, got {beta}"
        )));
    }
    let d = rho.dim() as f64;
    let (th_i, z_i) = gibbs_state(spec_i, beta);
    let (th_f, z_f) = gibbs_state(spec_f, beta);
    let split = dephasing.split(rho, spec_i)?;
    let thermal_deviation = split.populations.matrix().max_abs_diff(th_i.matrix());
    if thermal_deviation > THERMAL_DIAGONAL_TOL {
        log::warn!("diagonal part of the initial state is not thermal (deviation {thermal_deviation:.3e})");
    }
    let chi = rho.matrix() - th_i.matrix();
    let diagonal_part = d * th_f.matrix().trace_product(&channel.apply_matrix(th_i.matrix())?).re;
    let coherence_part = d * th_f.matrix().trace_product(&channel.apply_matrix(&chi)?).re;
    let g = characteristic_function(rho, channel, spec_i, spec_f, I * beta, Protocol::Epm)?;
    Ok(JarzynskiReport {
        total: g.re * z_i / z_f,
        diagonal_part,
        coherence_part,
        beta,
        delta_f: -(z_f / z_i).ln() / beta,
        thermal_deviation,
    })
}

/// `⟨ΔE²⟩ = ⟨ΔE²⟩_𝒫 + Tr(H_f² Φ[χ]) − 2 Tr(Φ[χ] H_f) Tr(𝒫 H_i)`.
///
/// Exact when `𝒫` commutes with `H_i` (dephasing in an energy eigenbasis or
/// energy sectors).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMomentSplit {
    pub total: f64,
    pub population_part: f64,
    pub coherence_part: f64,
}

impl SecondMomentSplit {
    /// `1 − ⟨ΔE²⟩_𝒫 / ⟨ΔE²⟩`
    pub fn coherence_fraction(&self) -> f64 {
        1.0 - self.population_part / self.total
    }
}

/// EPM second moment `Tr(H_f²Φ[X]) − 2 Tr(H_fΦ[X]) Tr(H_iX) + Tr(H_i²X)` for unit-trace `X`.
fn epm_second_moment_of(x: &ComplexMatrix, phi_x: &ComplexMatrix, h_i: &ComplexMatrix, h_f: &ComplexMatrix) -> f64 {
    let hf2 = h_f.matmul(h_f);
    let hi2 = h_i.matmul(h_i);
    (hf2.trace_product(phi_x) - h_f.trace_product(phi_x) * h_i.trace_product(x) * 2.0 + hi2.trace_product(x)).re
}

pub fn epm_second_moment_split(
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
    dephasing: &Dephasing,
) -> Result<SecondMomentSplit> {
    let split = dephasing.split(rho, spec_i)?;
    let h_i = spec_i.reconstruct();
    let h_f = spec_f.reconstruct();
    let p = split.populations.matrix();
    let phi_p = channel.apply_matrix(p)?;
    let phi_chi = channel.apply_matrix(&split.coherences)?;
    let population_part = epm_second_moment_of(p, &phi_p, &h_i, &h_f);
    let coherence_part =
        (h_f.matmul(&h_f).trace_product(&phi_chi) - phi_chi.trace_product(&h_f) * p.trace_product(&h_i) * 2.0).re;
    Ok(SecondMomentSplit {
        total: population_part + coherence_part,
        population_part,
        coherence_part,
    })
}

/// `Tr(H_f Φ[ρ]) − Tr(H_i ρ)`
pub fn mean_energy_change(
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
) -> Result<f64> {
    let out = channel.apply_matrix(rho.matrix())?;
    Ok((spec_f.reconstruct().trace_product(&out) - spec_i.reconstruct().trace_product(rho.matrix())).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{delta_distribution, joint};

    fn sigma_z() -> SpectralDecomposition {
        SpectralDecomposition::new(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap()
    }

    fn plus() -> DensityOperator {
        DensityOperator::from_pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap()
    }

    fn ry(angle: f64) -> QuantumChannel {
        let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
        QuantumChannel::unitary(ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]])).unwrap()
    }

    #[test]
    fn unity_at_zero() {
        let s = sigma_z();
        for p in Protocol::ALL {
            let g = characteristic_function(&plus(), &ry(0.4), &s, &s, C64::new(0.0, 0.0), p).unwrap();
            assert!((g - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn matches_distribution_sum() {
        let s = sigma_z();
        let ch = ry(0.7);
        let rho = DensityOperator::from_pure(&[C64::new(0.8, 0.0), C64::new(0.36, 0.48)]).unwrap();
        for p in Protocol::ALL {
            let dist = delta_distribution(&joint(p, &rho, &ch, &s, &s).unwrap(), None);
            for u in [C64::new(0.3, 0.0), C64::new(-1.7, 0.0), C64::new(0.0, 0.6)] {
                let g = characteristic_function(&rho, &ch, &s, &s, u, p).unwrap();
                assert!((g - dist.characteristic(u)).norm() < 1e-12, "{p} {u}");
            }
        }
    }

    #[test]
    fn split_vanishing_coherence() {
        let s = sigma_z();
        let rho = DensityOperator::from_probabilities(&[0.3, 0.7]).unwrap();
        let sp = characteristic_split(&rho, &ry(1.0), &s, &s, I * 0.5, &Dephasing::computational(2)).unwrap();
        assert_eq!(sp.coherence, C64::new(0.0, 0.0));
        let m = epm_second_moment_split(&rho, &ry(1.0), &s, &s, &Dephasing::computational(2)).unwrap();
        assert!(m.coherence_part.abs() < 1e-15);
    }

    #[test]
    fn gibbs_identity_channel_gives_purity() {
        let beta = 0.8;
        let s = SpectralDecomposition::new(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 3.0])).unwrap();
        let (th, _) = gibbs_state(&s, beta);
        let r = jarzynski(
            &th,
            &QuantumChannel::identity(3),
            &s,
            &s,
            beta,
            &Dephasing::computational(3),
        )
        .unwrap();
        let oracle = 3.0 * th.purity();
        assert!((r.total - oracle).abs() < 1e-12);
        assert!((r.diagonal_part - oracle).abs() < 1e-12);
        assert!(r.coherence_part.abs() < 1e-15);
        assert!(r.is_thermal());
        assert!(r.delta_f.abs() < 1e-15);
    }
}
