//! Driven three-level system coupled to three thermal baths.
//!
//! Levels `(g, A, B)` are basis indices `0, 1, 2` with bare energies
//! `0, ω₁, ω₃`. Bath `r` couples to transition `r` with `ω₂ = ω₃ − ω₁`.

use std::str::FromStr;

use rayon::prelude::*;

use crate::channels::{
    DriveTerm, HamiltonianSchedule, JumpOperatorSet, LindbladPropagator, QuantumChannel, DEFAULT_STEP,
};
use crate::error::{Error, Result};
use crate::protocols::{
    delta_distribution, epm_joint, epm_second_moment_split, gibbs_state, jarzynski, mll_joint, shannon_entropy,
    tpm_joint, JarzynskiReport, SecondMomentSplit,
};
use crate::qcore::{Basis, ComplexMatrix, DensityOperator, Dephasing, SpectralDecomposition};
use crate::sampling::{random_coherence, SeededGenerator};

pub const DRIVE_AMPLITUDE: f64 = 1.5;

/// Thermal occupation of a bath mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occupation {
    /// `1/(e^{βω} − 1)`; the baths drive the system to its Gibbs state.
    Bose,
    /// `1/(e^{βω} + 1)`.
    AsPrinted,
}

impl FromStr for Occupation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bose" => Ok(Self::Bose),
            "as_printed" => Ok(Self::AsPrinted),
            _ => Err(Error::InvalidConfig(format!(
                "occupation must be 'bose' or 'as_printed', got '{s}'"
            ))),
        }
    }
}

impl Occupation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Bose => "bose",
            Self::AsPrinted => "as_printed",
        }
    }

    pub fn mean(&self, beta: f64, omega: f64) -> f64 {
        match self {
            Self::Bose => 1.0 / (beta * omega).exp_m1(),
            Self::AsPrinted => 1.0 / ((beta * omega).exp() + 1.0),
        }
    }
}

/// Which Hamiltonian the energy measurements refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measurement {
    /// `H(t) = H + H_drive(t)` at each measurement time.
    Full,
    /// The undriven `H`.
    Bare,
}

impl FromStr for Measurement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "bare" => Ok(Self::Bare),
            _ => Err(Error::InvalidConfig(format!(
                "measurement must be 'full' or 'bare', got '{s}'"
            ))),
        }
    }
}

impl Measurement {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::Bare => "bare",
        }
    }
}

/// Time dependence of `g(t)` (on `g↔B`) and `f(t)` (on `A↔B`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveForm {
    Off,
    /// `g = a sin²t`, `f = a − g`.
    Complementary,
    /// `g = a sin²t`, `f = a(1 − sin²2t)`.
    DoubleFrequency,
}

impl DriveForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Off => "off",
            Self::Complementary => "complementary",
            Self::DoubleFrequency => "double_frequency",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreeLevelConfig {
    pub omega1: f64,
    pub omega3: f64,
    pub gamma: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub drive: DriveForm,
    pub drive_amplitude: f64,
    pub t_max: f64,
    pub step: f64,
    pub occupation: Occupation,
    pub measurement: Measurement,
}

impl Default for ThreeLevelConfig {
    fn default() -> Self {
        Self {
            omega1: 1.0,
            omega3: 3.0,
            gamma: 0.1,
            beta1: 3.0,
            beta2: 1.0,
            beta3: 2.0,
            drive: DriveForm::Complementary,
            drive_amplitude: DRIVE_AMPLITUDE,
            t_max: 10.0,
            step: DEFAULT_STEP,
            occupation: Occupation::Bose,
            measurement: Measurement::Full,
        }
    }
}

impl ThreeLevelConfig {
    pub fn omega2(&self) -> f64 {
        self.omega3 - self.omega1
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.omega1 > 0.0 && self.omega3 > self.omega1) {
            return bad(format!(
                "need 0 < omega1 < omega3, got {} and {}",
                self.omega1, self.omega3
            ));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return bad(format!("gamma must be nonnegative, got {}", self.gamma));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2), ("beta3", self.beta3)] {
            if !(b > 0.0) || !b.is_finite() {
                return bad(format!("{name} must be positive, got {b}"));
            }
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return bad(format!("step must be positive, got {}", self.step));
        }
        if !self.drive_amplitude.is_finite() {
            return bad("drive amplitude must be finite".into());
        }
        Ok(())
    }

    pub fn bare_hamiltonian(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[0.0, self.omega1, self.omega3])
    }

    /// `(label, i, j, η_ij)` for the six jumps `L_ij = √η_ij |i⟩⟨j|`.
    pub fn jump_rates(&self) -> [(&'static str, usize, usize, f64); 6] {
        let n = |beta: f64, omega: f64| self.occupation.mean(beta, omega);
        let n1 = n(self.beta1, self.omega1);
        let n2 = n(self.beta2, self.omega2());
        let n3 = n(self.beta3, self.omega3);
        let g = self.gamma;
        [
            ("gA", 0, 1, g * (n1 + 1.0)),
            ("Ag", 1, 0, g * n1),
            ("AB", 1, 2, g * (n2 + 1.0)),
            ("BA", 2, 1, g * n2),
            ("gB", 0, 2, g * (n3 + 1.0)),
            ("Bg", 2, 0, g * n3),
        ]
    }

    fn drive_terms(&self) -> Vec<DriveTerm> {
        let a = self.drive_amplitude;
        let gb = &ComplexMatrix::unit(3, 0, 2) + &ComplexMatrix::unit(3, 2, 0);
        let ab = &ComplexMatrix::unit(3, 1, 2) + &ComplexMatrix::unit(3, 2, 1);
        let g = move |t: f64| a * t.sin().powi(2);
        match self.drive {
            DriveForm::Off => Vec::new(),
            DriveForm::Complementary => vec![
                DriveTerm::new(gb, g, "g"),
                DriveTerm::new(ab, move |t: f64| a - g(t), "f"),
            ],
            DriveForm::DoubleFrequency => vec![
                DriveTerm::new(gb, g, "g"),
                DriveTerm::new(ab, move |t: f64| a * (1.0 - (2.0 * t).sin().powi(2)), "f"),
            ],
        }
    }

    pub fn hamiltonian_at(&self, t: f64) -> ComplexMatrix {
        let mut h = self.bare_hamiltonian();
        for term in self.drive_terms() {
            h += &term.operator.scale_real((term.amplitude)(t));
        }
        h
    }

    /// Hamiltonian that energy measurements at time `t` refer to.
    pub fn measured_hamiltonian(&self, t: f64) -> ComplexMatrix {
        match self.measurement {
            Measurement::Full => self.hamiltonian_at(t),
            Measurement::Bare => self.bare_hamiltonian(),
        }
    }
}

pub fn three_level_model(config: &ThreeLevelConfig) -> Result<(HamiltonianSchedule, JumpOperatorSet)> {
    config.validate()?;
    let schedule = HamiltonianSchedule::new(config.bare_hamiltonian(), config.drive_terms())?;
    let mut jumps = JumpOperatorSet::empty(3);
    for (label, i, j, eta) in config.jump_rates() {
        if eta > 0.0 {
            jumps.push(ComplexMatrix::unit(3, i, j).scale_real(eta.sqrt()), label)?;
        }
    }
    Ok((schedule, jumps))
}

pub fn three_level_propagator(config: &ThreeLevelConfig, t_f: f64) -> Result<LindbladPropagator> {
    let (schedule, jumps) = three_level_model(config)?;
    LindbladPropagator::new(schedule, jumps, 0.0, t_f, config.step)
}

/// `0, dt, 2dt, …, t_max`
pub fn time_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let n = (t_max / dt).round() as usize;
    (0..=n).map(|k| k as f64 * dt).collect()
}

/// Channels `Φ_{0→t}` on a time grid plus the measurement structure at each end.
#[derive(Debug, Clone)]
pub struct ThreeLevelDynamics {
    pub config: ThreeLevelConfig,
    pub times: Vec<f64>,
    pub channels: Vec<QuantumChannel>,
    pub spec_i: SpectralDecomposition,
    pub spec_f: Vec<SpectralDecomposition>,
    /// Diagonal in the eigenbasis of the measured `H(0)`.
    pub dephasing: Dephasing,
}

impl ThreeLevelDynamics {
    pub fn new(config: &ThreeLevelConfig, times: &[f64]) -> Result<Self> {
        let t_end = times.last().copied().unwrap_or(0.0);
        if times.first().is_some_and(|t| *t < 0.0) || t_end > config.t_max + 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "sample times must lie in [0, {}]",
                config.t_max
            )));
        }
        let prop = three_level_propagator(config, t_end.max(config.step))?;
        let channels = prop
            .superoperator_trajectory(times)?
            .into_iter()
            .map(QuantumChannel::superoperator)
            .collect::<Result<Vec<_>>>()?;
        let spec_i = SpectralDecomposition::new(&config.measured_hamiltonian(0.0))?;
        let spec_f = times
            .iter()
            .map(|t| SpectralDecomposition::new(&config.measured_hamiltonian(*t)))
            .collect::<Result<Vec<_>>>()?;
        let dephasing = Dephasing::InBasis(Basis::from_columns(
            spec_i.eigen().vectors.clone(),
            "initial energy eigenbasis",
        )?);
        Ok(Self {
            config: config.clone(),
            times: times.to_vec(),
            channels,
            spec_i,
            spec_f,
            dephasing,
        })
    }

    pub fn basis(&self) -> &Basis {
        match &self.dephasing {
            Dephasing::InBasis(b) => b,
            Dephasing::EnergySectors => unreachable!("three-level dephasing is basis-defined"),
        }
    }

    pub fn thermal_state(&self, beta: f64) -> DensityOperator {
        gibbs_state(&self.spec_i, beta).0
    }

    /// `ρ_th(β) + χ` with `χ` a random coherence in the initial energy eigenbasis.
    pub fn coherent_thermal_state(&self, beta: f64, scale: f64, gen: &mut SeededGenerator) -> Result<DensityOperator> {
        let th = self.thermal_state(beta);
        let pops: Vec<f64> = self
            .basis()
            .to_coordinates(th.matrix())
            .diagonal()
            .iter()
            .map(|z| z.re)
            .collect();
        let chi = self.basis().from_coordinates(&random_coherence(&pops, scale, gen)?);
        Ok(DensityOperator::new_unchecked((th.matrix() + &chi).hermitian_part()))
    }

    pub fn second_moment_split(&self, rho: &DensityOperator, idx: usize) -> Result<SecondMomentSplit> {
        epm_second_moment_split(
            rho,
            &self.channels[idx],
            &self.spec_i,
            &self.spec_f[idx],
            &self.dephasing,
        )
    }

    /// `max_t (1 − ⟨ΔE²⟩_𝒫/⟨ΔE²⟩)` over samples with a nonzero second moment.
    pub fn max_coherence_fraction(&self, rho: &DensityOperator) -> Result<(f64, f64)> {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for (idx, &t) in self.times.iter().enumerate() {
            let s = self.second_moment_split(rho, idx)?;
            if s.total.abs() > 1e-12 {
                let f = s.coherence_fraction();
                if f > best.0 {
                    best = (f, t);
                }
            }
        }
        Ok(best)
    }

    pub fn evaluate(&self, rho: &DensityOperator, beta: Option<f64>) -> Result<Vec<ThreeLevelRow>> {
        (0..self.times.len()).map(|i| self.evaluate_at(rho, beta, i)).collect()
    }

    pub fn evaluate_at(&self, rho: &DensityOperator, beta: Option<f64>, idx: usize) -> Result<ThreeLevelRow> {
        let ch = &self.channels[idx];
        let (si, sf) = (&self.spec_i, &self.spec_f[idx]);
        let split = self.dephasing.split(rho, si)?;
        let epm = epm_joint(rho, ch, si, sf)?;
        let epm_pop = epm_joint(&split.populations, ch, si, sf)?;
        let tpm = tpm_joint(rho, ch, si, sf)?;
        let mll = mll_joint(rho, ch, si, sf)?;
        let m2 = |j| delta_distribution(j, None).moment(2);
        let jarz = match beta {
            Some(b) => {
                let report = jarzynski(rho, ch, si, sf, b, &self.dephasing)?;
                let (_, z_i) = gibbs_state(si, b);
                let (_, z_f) = gibbs_state(sf, b);
                let g_tpm = delta_distribution(&tpm, None).characteristic(crate::qcore::I * b).re;
                Some((report, g_tpm * z_i / z_f))
            }
            None => None,
        };
        Ok(ThreeLevelRow {
            t: self.times[idx],
            jarzynski: jarz.map(|j| j.0),
            jarzynski_tpm: jarz.map(|j| j.1),
            second_moment: self.second_moment_split(rho, idx)?,
            m2_epm: m2(&epm),
            m2_tpm: m2(&tpm),
            m2_mll: m2(&mll),
            h_epm: shannon_entropy(&epm),
            h_epm_populations: shannon_entropy(&epm_pop),
            h_tpm: shannon_entropy(&tpm),
            h_mll: shannon_entropy(&mll),
        })
    }
}

/// All protocol quantities at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeLevelRow {
    pub t: f64,
    pub jarzynski: Option<JarzynskiReport>,
    /// `e^{βΔF} 𝒢_TPM(iβ)`
    pub jarzynski_tpm: Option<f64>,
    pub second_moment: SecondMomentSplit,
    pub m2_epm: f64,
    pub m2_tpm: f64,
    pub m2_mll: f64,
    pub h_epm: f64,
    /// Entropy of the EPM joint of the dephased state.
    pub h_epm_populations: f64,
    pub h_tpm: f64,
    pub h_mll: f64,
}

pub fn three_level_experiment(
    config: &ThreeLevelConfig,
    rho: &DensityOperator,
    beta: Option<f64>,
    times: &[f64],
) -> Result<Vec<ThreeLevelRow>> {
    ThreeLevelDynamics::new(config, times)?.evaluate(rho, beta)
}

/// Evaluates `f` on `n` independently seeded states in parallel, preserving order.
pub fn ensemble<T: Send>(
    n: usize,
    seed: u64,
    f: impl Fn(usize, &mut SeededGenerator) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let root = SeededGenerator::new(seed);
    (0..n)
        .into_par_iter()
        .map(|k| f(k, &mut root.child(k as u64)))
        .collect()
}
