//! Two qubits prepared by local rotations and coupled by a controlled
//! single-qubit gate.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with `σ_z = diag(1, −1)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::protocols::{
    characteristic_function, characteristic_split, delta_distribution, epm_joint, epm_split_shots,
    estimate_exponential, estimate_moment, sample_shot_outcomes, tpm_joint, Estimate, Protocol, BOOTSTRAP_RESAMPLES,
};
use crate::qcore::{ComplexMatrix, DensityOperator, Dephasing, SpectralDecomposition, C64, I};
use crate::sampling::child_seed;

/// Allowed `|sech(βε) − sin θ₀|` when both are given.
pub const CONSISTENCY_TOL: f64 = 1e-3;
pub const DEFAULT_THETA0: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotMode {
    Exact,
    Shots(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitConfig {
    pub beta: Option<f64>,
    pub theta0: Option<f64>,
    pub epsilon: f64,
    pub theta_grid: Vec<f64>,
    pub phi: f64,
    pub lambda: f64,
    pub shots: ShotMode,
    pub seed: u64,
}

impl Default for TwoQubitConfig {
    fn default() -> Self {
        Self {
            beta: None,
            theta0: Some(DEFAULT_THETA0),
            epsilon: 1.0,
            theta_grid: default_theta_grid(),
            phi: 0.0,
            lambda: 0.0,
            shots: ShotMode::Exact,
            seed: 0,
        }
    }
}

/// `θ_n = nπ/10`, `n = 0…20`.
pub fn default_theta_grid() -> Vec<f64> {
    (0..=20).map(|n| n as f64 * PI / 10.0).collect()
}

/// `β = ln tan(θ₀/2) / ε`, the inverse temperature whose Gibbs state is the
/// diagonal of the prepared state.
pub fn beta_from_theta0(theta0: f64, epsilon: f64) -> f64 {
    (theta0 / 2.0).tan().ln() / epsilon
}

/// Inverse of [`beta_from_theta0`]: `θ₀ = 2 atan(e^{βε})`.
pub fn theta0_from_beta(beta: f64, epsilon: f64) -> f64 {
    2.0 * (beta * epsilon).exp().atan()
}

impl TwoQubitConfig {
    /// Fills in whichever of `β`, `θ₀` is missing. With neither given, `θ₀ = 2`.
    pub fn resolve(&self) -> Result<(f64, f64)> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        let (beta, theta0) = match (self.beta, self.theta0) {
            (Some(b), Some(t)) => {
                let gap = (1.0 / (b * self.epsilon).cosh() - t.sin()).abs();
                if !(gap < CONSISTENCY_TOL) {
                    return Err(Error::InconsistentConfig(format!(
                        "sech(beta*epsilon) = {:.6} but sin(theta0) = {:.6}",
                        1.0 / (b * self.epsilon).cosh(),
                        t.sin()
                    )));
                }
                (b, t)
            }
            (Some(b), None) => (b, theta0_from_beta(b, self.epsilon)),
            (None, t) => {
                let t = t.unwrap_or(DEFAULT_THETA0);
                (beta_from_theta0(t, self.epsilon), t)
            }
        };
        if !beta.is_finite() || !theta0.is_finite() || !(theta0 > 0.0 && theta0 < PI) {
            return Err(Error::InvalidConfig(format!(
                "theta0 = {theta0} gives no finite inverse temperature"
            )));
        }
        if beta == 0.0 {
            return Err(Error::InvalidConfig(
                "beta = 0 leaves the characteristic function trivial".into(),
            ));
        }
        if let ShotMode::Shots(0) = self.shots {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        Ok((beta, theta0))
    }
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
}

/// `ε(σ_z ⊗ I + I ⊗ σ_z) = diag(2ε, 0, 0, −2ε)`
pub fn two_qubit_hamiltonian(epsilon: f64) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    (&sigma_z().kron(&id) + &id.kron(&sigma_z())).scale_real(epsilon)
}

/// Real rotation used for state preparation.
pub fn rotation(theta0: f64) -> ComplexMatrix {
    let (c, s) = ((theta0 / 2.0).cos(), (theta0 / 2.0).sin());
    ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]])
}

/// `(U(θ₀) ⊗ U(θ₀))|00⟩`
pub fn initial_state_vector(theta0: f64) -> Vec<C64> {
    let (c, s) = ((theta0 / 2.0).cos(), (theta0 / 2.0).sin());
    [c * c, c * s, s * c, s * s].iter().map(|x| C64::new(*x, 0.0)).collect()
}

pub fn two_qubit_initial_state(config: &TwoQubitConfig) -> Result<DensityOperator> {
    let (_, theta0) = config.resolve()?;
    DensityOperator::from_pure(&initial_state_vector(theta0))
}

/// Single-qubit gate `U(θ, φ, λ)`.
pub fn u_gate(theta: f64, phi: f64, lambda: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = |x: f64| C64::from_polar(1.0, x);
    ComplexMatrix::from_row_major(vec![C64::new(c, 0.0), -e(lambda) * s, e(phi) * s, e(lambda + phi) * c])
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U(θ, φ, λ)`
pub fn controlled_gate(theta: f64, phi: f64, lambda: f64) -> ComplexMatrix {
    let p0 = ComplexMatrix::unit(2, 0, 0);
    let p1 = ComplexMatrix::unit(2, 1, 1);
    &p0.kron(&ComplexMatrix::identity(2)) + &p1.kron(&u_gate(theta, phi, lambda))
}

/// Analytic characteristic functions at `u = iβ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub g_tpm: f64,
    pub g_epm: f64,
    pub g_epm_diag: f64,
    pub g_epm_coh: f64,
}

/// The analytic expressions in their own angle variable `ϑ`.
pub fn closed_form_characteristics(vartheta: f64, beta: f64, epsilon: f64) -> ClosedForm {
    let b = beta * epsilon;
    let e = f64::exp;
    let (s2, c2) = ((2.0 * vartheta).sin(), (2.0 * vartheta).cos());
    let denom = (e(2.0 * b) + 1.0).powi(4);
    let g_epm = 4.0
        * (e(6.0 * b) * (s2 - e(b) * c2).powi(2) + e(4.0 * b) * (e(b) * s2 + c2).powi(2) + e(4.0 * b) + 1.0)
        / denom;
    let g_epm_diag =
        4.0 * (2.0 * e(6.0 * b) * s2 * s2 + (e(4.0 * b) + e(8.0 * b)) * c2 * c2 + e(4.0 * b) + 1.0) / denom;
    let g_epm_coh = -0.5 * e(2.0 * b) * (4.0 * vartheta).sin() * b.tanh() / b.cosh().powi(3);
    ClosedForm {
        g_tpm: 1.0,
        g_epm,
        g_epm_diag,
        g_epm_coh,
    }
}

/// The analytic expressions for the controlled gate `U(θ, 0, 0)` at angle
/// `θ`: their angle variable is `ϑ = −θ/4`.
pub fn closed_form_at_gate(theta: f64, beta: f64, epsilon: f64) -> ClosedForm {
    closed_form_characteristics(-theta / 4.0, beta, epsilon)
}

/// One grid point of the sweep. Shot-mode rows carry standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub g_tpm: f64,
    pub g_epm: f64,
    pub g_epm_diag: f64,
    pub g_epm_coh: f64,
    /// Moments 1…4 of ΔE.
    pub moments_epm: [f64; 4],
    pub moments_tpm: [f64; 4],
    pub se: Option<SweepErrors>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepErrors {
    pub g_tpm: f64,
    pub g_epm: f64,
    pub g_epm_diag: f64,
    pub g_epm_coh: f64,
    pub moments_epm: [f64; 4],
    pub moments_tpm: [f64; 4],
}

/// Fixed ingredients shared by every grid point.
#[derive(Debug, Clone)]
pub struct TwoQubitSetup {
    pub beta: f64,
    pub theta0: f64,
    pub epsilon: f64,
    pub rho: DensityOperator,
    pub spec: SpectralDecomposition,
    /// Diagonal in the computational basis (the gate's basis).
    pub dephasing: Dephasing,
}

impl TwoQubitSetup {
    pub fn new(config: &TwoQubitConfig) -> Result<Self> {
        let (beta, theta0) = config.resolve()?;
        Ok(Self {
            beta,
            theta0,
            epsilon: config.epsilon,
            rho: DensityOperator::from_pure(&initial_state_vector(theta0))?,
            spec: SpectralDecomposition::new(&two_qubit_hamiltonian(config.epsilon))?,
            dephasing: Dephasing::computational(4),
        })
    }

    pub fn channel(&self, theta: f64, phi: f64, lambda: f64) -> Result<QuantumChannel> {
        QuantumChannel::unitary(controlled_gate(theta, phi, lambda))
    }

    pub fn exact_row(&self, theta: f64, phi: f64, lambda: f64) -> Result<SweepRow> {
        let ch = self.channel(theta, phi, lambda)?;
        let u = I * self.beta;
        let s = &self.spec;
        let g_tpm = characteristic_function(&self.rho, &ch, s, s, u, Protocol::Tpm)?;
        let split = characteristic_split(&self.rho, &ch, s, s, u, &self.dephasing)?;
        let epm = delta_distribution(&epm_joint(&self.rho, &ch, s, s)?, None);
        let tpm = delta_distribution(&tpm_joint(&self.rho, &ch, s, s)?, None);
        Ok(SweepRow {
            theta,
            g_tpm: g_tpm.re,
            g_epm: split.total().re,
            g_epm_diag: split.population.re,
            g_epm_coh: split.coherence.re,
            moments_epm: [1, 2, 3, 4].map(|n| epm.moment(n)),
            moments_tpm: [1, 2, 3, 4].map(|n| tpm.moment(n)),
            se: None,
        })
    }

    /// Emulates `n_shots` runs per protocol (and per subgroup for the EPM split).
    pub fn shot_row(&self, theta: f64, phi: f64, lambda: f64, n_shots: usize, seed: u64) -> Result<SweepRow> {
        let ch = self.channel(theta, phi, lambda)?;
        let s = &self.spec;
        let seeds: Vec<u64> = (0..6).map(|k| child_seed(seed, k)).collect();
        let tpm = sample_shot_outcomes(&self.rho, &ch, s, s, Protocol::Tpm, n_shots, seeds[0])?;
        let epm = sample_shot_outcomes(&self.rho, &ch, s, s, Protocol::Epm, n_shots, seeds[1])?;
        let g_tpm = estimate_exponential(&tpm, self.beta, BOOTSTRAP_RESAMPLES, seeds[2]);
        let split = epm_split_shots(
            &self.rho,
            &ch,
            s,
            s,
            &self.dephasing,
            self.beta,
            n_shots,
            seeds[3],
            BOOTSTRAP_RESAMPLES,
        )?;
        let me: [Estimate; 4] = [1, 2, 3, 4].map(|n| estimate_moment(&epm, n, BOOTSTRAP_RESAMPLES, seeds[4]));
        let mt: [Estimate; 4] = [1, 2, 3, 4].map(|n| estimate_moment(&tpm, n, BOOTSTRAP_RESAMPLES, seeds[5]));
        Ok(SweepRow {
            theta,
            g_tpm: g_tpm.value,
            g_epm: split.total.value,
            g_epm_diag: split.diagonal.value,
            g_epm_coh: split.coherence.value,
            moments_epm: me.map(|e| e.value),
            moments_tpm: mt.map(|e| e.value),
            se: Some(SweepErrors {
                g_tpm: g_tpm.se,
                g_epm: split.total.se,
                g_epm_diag: split.diagonal.se,
                g_epm_coh: split.coherence.se,
                moments_epm: me.map(|e| e.se),
                moments_tpm: mt.map(|e| e.se),
            }),
        })
    }
}

/// Evaluates every grid angle; rows are in grid order.
pub fn two_qubit_sweep(config: &TwoQubitConfig) -> Result<Vec<SweepRow>> {
    let setup = TwoQubitSetup::new(config)?;
    config
        .theta_grid
        .par_iter()
        .enumerate()
        .map(|(n, &theta)| match config.shots {
            ShotMode::Exact => setup.exact_row(theta, config.phi, config.lambda),
            ShotMode::Shots(k) => {
                setup.shot_row(theta, config.phi, config.lambda, k, child_seed(config.seed, n as u64))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_diagonal() {
        assert_eq!(
            two_qubit_hamiltonian(1.0),
            ComplexMatrix::from_real_diagonal(&[2.0, 0.0, 0.0, -2.0])
        );
    }

    #[test]
    fn gate_special_cases() {
        assert!(controlled_gate(0.0, 0.0, 0.0).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        let g = controlled_gate(PI, 0.0, 0.0);
        assert!((g[(2, 3)].re + 1.0).abs() < 1e-15);
        assert!((g[(3, 2)].re - 1.0).abs() < 1e-15);
        assert!(g[(2, 2)].norm() < 1e-15 && g[(3, 3)].norm() < 1e-15);
    }

    #[test]
    fn balanced_state_at_quarter_turn() {
        let v = initial_state_vector(PI / 2.0);
        for a in v {
            assert!((a.re - 0.5).abs() < 1e-15);
        }
        assert!(beta_from_theta0(PI / 2.0, 1.0).abs() < 1e-15);
    }

    #[test]
    fn beta_theta0_round_trip() {
        for b in [0.1, 0.443, 1.3] {
            let t = theta0_from_beta(b, 1.0);
            assert!((beta_from_theta0(t, 1.0) - b).abs() < 1e-12);
            assert!((1.0 / b.cosh() - t.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn inconsistent_config_rejected() {
        let cfg = TwoQubitConfig {
            beta: Some(1.0),
            theta0: Some(2.0),
            ..Default::default()
        };
        assert!(matches!(cfg.resolve(), Err(Error::InconsistentConfig(_))));
        let ok = TwoQubitConfig {
            beta: Some(0.443),
            theta0: Some(2.0),
            ..Default::default()
        };
        assert!(ok.resolve().is_ok());
    }

    #[test]
    fn closed_form_limits() {
        for t in [0.0, 0.3, 1.1] {
            let c = closed_form_characteristics(t, 1e-300, 1.0);
            assert!((c.g_epm - 1.0).abs() < 1e-12);
        }
        let c = closed_form_characteristics(PI / 4.0, 0.443, 1.0);
        assert!(c.g_epm_coh.abs() < 1e-15);
    }
}
