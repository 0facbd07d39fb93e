//! Time-dependent Lindblad dynamics integrated with fixed-step RK4.
//!
//! Matrices are vectorised column-major (`vec(X)[i + d·j] = X_ij`), so
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, DensityOperator, C64, I, ONE};

pub const DEFAULT_STEP: f64 = 1e-3;
/// Trace drift beyond this aborts an integration.
pub const TRACE_FAILURE_TOL: f64 = 1e-6;
/// Hermiticity tolerance for `H(t)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub type Amplitude = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `amplitude(t) · operator`
#[derive(Clone)]
pub struct DriveTerm {
    pub operator: ComplexMatrix,
    pub amplitude: Amplitude,
    pub label: String,
}

impl DriveTerm {
    pub fn new(
        operator: ComplexMatrix,
        amplitude: impl Fn(f64) -> f64 + Send + Sync + 'static,
        label: impl Into<String>,
    ) -> Self {
        Self {
            operator,
            amplitude: Arc::new(amplitude),
            label: label.into(),
        }
    }
}

impl fmt::Debug for DriveTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriveTerm")
            .field("label", &self.label)
            .field("operator", &self.operator)
            .finish_non_exhaustive()
    }
}

/// `H(t) = H + Σ_k a_k(t) V_k`
#[derive(Debug, Clone)]
pub struct HamiltonianSchedule {
    base: ComplexMatrix,
    drive: Vec<DriveTerm>,
}

impl HamiltonianSchedule {
    pub fn constant(base: ComplexMatrix) -> Result<Self> {
        Self::new(base, Vec::new())
    }

    pub fn new(base: ComplexMatrix, drive: Vec<DriveTerm>) -> Result<Self> {
        let d = base.dim();
        let deviation = base.hermiticity_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NonHermitianInput { deviation });
        }
        for term in &drive {
            if term.operator.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: term.operator.dim(),
                });
            }
            let deviation = term.operator.hermiticity_deviation();
            if deviation > HERMITIAN_TOL {
                return Err(Error::NonHermitianInput { deviation });
            }
        }
        Ok(Self { base, drive })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &ComplexMatrix {
        &self.base
    }

    pub fn drive(&self) -> &[DriveTerm] {
        &self.drive
    }

    pub fn is_autonomous(&self) -> bool {
        self.drive.is_empty()
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        let mut h = self.base.clone();
        for term in &self.drive {
            h += &term.operator.scale_real((term.amplitude)(t));
        }
        h
    }
}

#[derive(Debug, Clone)]
pub struct JumpOperator {
    /// Rate already folded in: `L = √η |i><j|`.
    pub operator: ComplexMatrix,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct JumpOperatorSet {
    dim: usize,
    ops: Vec<JumpOperator>,
}

impl JumpOperatorSet {
    pub fn empty(dim: usize) -> Self {
        Self { dim, ops: Vec::new() }
    }

    pub fn push(&mut self, operator: ComplexMatrix, label: impl Into<String>) -> Result<()> {
        if operator.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: operator.dim(),
            });
        }
        self.ops.push(JumpOperator {
            operator,
            label: label.into(),
        });
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &JumpOperator> {
        self.ops.iter()
    }
}

/// `−i[H, ρ] + Σ (L ρ L† − ½{L†L, ρ})`
pub fn lindblad_rhs(h: &ComplexMatrix, jumps: &JumpOperatorSet, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = h.dim();
    for found in [rho.dim(), jumps.dim()] {
        if found != d {
            return Err(Error::DimensionMismatch { expected: d, found });
        }
    }
    let mut out = h.commutator(rho).scale(-I);
    for j in jumps.iter() {
        let l = &j.operator;
        let ld = l.adjoint();
        out += &l.matmul(rho).matmul(&ld);
        out -= &ld.matmul(l).anticommutator(rho).scale_real(0.5);
    }
    Ok(out)
}

/// Generator of `d vec(ρ)/dt = 𝓛 vec(ρ)` for fixed `H` and jumps.
pub fn liouvillian(h: &ComplexMatrix, jumps: &JumpOperatorSet) -> ComplexMatrix {
    let d = h.dim();
    let id = ComplexMatrix::identity(d);
    let mut l = (&id.kron(h) - &h.transpose().kron(&id)).scale(-I);
    for j in jumps.iter() {
        let op = &j.operator;
        let ldl = op.adjoint().matmul(op);
        l += &op.conj().kron(op);
        l -= &id.kron(&ldl).scale_real(0.5);
        l -= &ldl.transpose().kron(&id).scale_real(0.5);
    }
    l
}

/// `𝓛(t) = 𝓛_0 + Σ_k a_k(t) 𝓛_k`, with `𝓛_k` the commutator part of drive `k`.
#[derive(Clone)]
struct Generator {
    fixed: ComplexMatrix,
    driven: Vec<(Amplitude, ComplexMatrix)>,
}

impl Generator {
    fn new(schedule: &HamiltonianSchedule, jumps: &JumpOperatorSet) -> Self {
        let fixed = liouvillian(schedule.base(), jumps);
        let none = JumpOperatorSet::empty(schedule.dim());
        let driven = schedule
            .drive()
            .iter()
            .map(|t| (t.amplitude.clone(), liouvillian(&t.operator, &none)))
            .collect();
        Self { fixed, driven }
    }

    fn at(&self, t: f64) -> ComplexMatrix {
        let mut l = self.fixed.clone();
        for (a, lk) in &self.driven {
            let x = a(t);
            if x != 0.0 {
                l += &lk.scale_real(x);
            }
        }
        l
    }

    fn is_autonomous(&self) -> bool {
        self.driven.is_empty()
    }
}

/// Uniform step count and size covering `[t_i, t_f]` with steps no longer than `step`.
fn step_plan(t_i: f64, t_f: f64, step: f64) -> Result<(usize, f64)> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(t_f >= t_i) {
        return Err(Error::InvalidArgument(format!("t_f = {t_f} precedes t_i = {t_i}")));
    }
    let span = t_f - t_i;
    if span == 0.0 {
        return Ok((0, 0.0));
    }
    let n = (span / step - 1e-9).ceil().max(1.0) as usize;
    let h = span / n as f64;
    if t_i + h == t_i {
        return Err(Error::IntegrationFailure("step underflow".into()));
    }
    Ok((n, h))
}

/// One RK4 step for `dY/dt = 𝓛(t) Y` with `Y` a matrix (columns evolve independently).
fn rk4_step(gen: &Generator, t: f64, h: f64, y: &ComplexMatrix) -> ComplexMatrix {
    let l0 = gen.at(t);
    let lm = gen.at(t + 0.5 * h);
    let l1 = gen.at(t + h);
    let k1 = l0.matmul(y);
    let k2 = lm.matmul(&(y + &k1.scale_real(0.5 * h)));
    let k3 = lm.matmul(&(y + &k2.scale_real(0.5 * h)));
    let k4 = l1.matmul(&(y + &k3.scale_real(h)));
    let mut incr = &k1 + &k4;
    incr += &(&k2 + &k3).scale_real(2.0);
    y + &incr.scale_real(h / 6.0)
}

fn rk4_vec_step(gen: &Generator, t: f64, h: f64, y: &[C64]) -> Vec<C64> {
    let axpy = |a: &[C64], b: &[C64], s: f64| -> Vec<C64> { a.iter().zip(b).map(|(x, y)| x + y * s).collect() };
    let lm = gen.at(t + 0.5 * h);
    let k1 = gen.at(t).mul_vec(y);
    let k2 = lm.mul_vec(&axpy(y, &k1, 0.5 * h));
    let k3 = lm.mul_vec(&axpy(y, &k2, 0.5 * h));
    let k4 = gen.at(t + h).mul_vec(&axpy(y, &k3, h));
    (0..y.len())
        .map(|i| y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0))
        .collect()
}

/// `I + h𝓛 + (h𝓛)²/2 + (h𝓛)³/6 + (h𝓛)⁴/24`: exactly one RK4 step of an
/// autonomous linear system.
fn rk4_step_matrix(l: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let hl = l.scale_real(h);
    let n = l.dim();
    let mut term = ComplexMatrix::identity(n);
    let mut m = term.clone();
    for k in 1..=4 {
        term = term.matmul(&hl).scale_real(1.0 / k as f64);
        m += &term;
    }
    m
}

fn matrix_power(m: &ComplexMatrix, mut n: usize) -> ComplexMatrix {
    let mut result = ComplexMatrix::identity(m.dim());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = result.matmul(&base);
        }
        n >>= 1;
        if n > 0 {
            base = base.matmul(&base);
        }
    }
    result
}

/// `max_col |Σ_a S[a + d·a, col] − δ_col|`: zero for trace-preserving maps.
pub(crate) fn trace_defect(s: &ComplexMatrix, d: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let col = i + d * j;
            let mut tr = C64::new(0.0, 0.0);
            for a in 0..d {
                tr += s[(a + d * a, col)];
            }
            let target = if i == j { ONE } else { C64::new(0.0, 0.0) };
            worst = worst.max((tr - target).norm());
        }
    }
    worst
}

fn check_superoperator(s: &ComplexMatrix, d: usize, t: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::IntegrationFailure(format!("non-finite propagator at t = {t}")));
    }
    let defect = trace_defect(s, d);
    if defect > TRACE_FAILURE_TOL {
        return Err(Error::IntegrationFailure(format!("trace drift {defect:e} at t = {t}")));
    }
    Ok(defect)
}

/// Integrates `ρ0` from `t_i` to `t_f`, re-symmetrising after every step.
pub fn propagate(
    schedule: &HamiltonianSchedule,
    jumps: &JumpOperatorSet,
    rho0: &DensityOperator,
    t_i: f64,
    t_f: f64,
    step: f64,
) -> Result<DensityOperator> {
    let (rho, _) = propagate_hermitian(schedule, jumps, rho0.matrix(), t_i, t_f, step)?;
    Ok(DensityOperator::new_unchecked(rho))
}

/// Integrates a Hermitian matrix and returns it with the largest trace drift seen.
pub fn propagate_hermitian(
    schedule: &HamiltonianSchedule,
    jumps: &JumpOperatorSet,
    x0: &ComplexMatrix,
    t_i: f64,
    t_f: f64,
    step: f64,
) -> Result<(ComplexMatrix, f64)> {
    let d = schedule.dim();
    for found in [x0.dim(), jumps.dim()] {
        if found != d {
            return Err(Error::DimensionMismatch { expected: d, found });
        }
    }
    let (n, h) = step_plan(t_i, t_f, step)?;
    let gen = Generator::new(schedule, jumps);
    let tr0 = x0.trace();
    let mut x = x0.hermitian_part();
    let mut drift: f64 = 0.0;
    for k in 0..n {
        let t = t_i + k as f64 * h;
        let v = rk4_vec_step(&gen, t, h, &x.vectorize());
        x = ComplexMatrix::unvectorize(&v).hermitian_part();
        if !x.is_finite() {
            return Err(Error::IntegrationFailure(format!("NaN at t = {}", t + h)));
        }
        let dt = (x.trace() - tr0).norm();
        drift = drift.max(dt);
        if dt > TRACE_FAILURE_TOL {
            return Err(Error::IntegrationFailure(format!(
                "trace drift {dt:e} at t = {}",
                t + h
            )));
        }
    }
    Ok((x, drift))
}

/// Trace-preserving Lindblad evolution over `[t_i, t_f]`.
#[derive(Debug, Clone)]
pub struct LindbladPropagator {
    pub schedule: HamiltonianSchedule,
    pub jumps: JumpOperatorSet,
    pub t_i: f64,
    pub t_f: f64,
    pub step: f64,
}

/// Result of re-running a propagator at half and quarter step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub step: f64,
    /// `max|S(h) − S(h/2)|`
    pub half_step_distance: f64,
    /// `|S(h) − S(h/4)| / |S(h/2) − S(h/4)|`; about 16 for a fourth-order method.
    pub order_factor: f64,
}

impl LindbladPropagator {
    pub fn new(schedule: HamiltonianSchedule, jumps: JumpOperatorSet, t_i: f64, t_f: f64, step: f64) -> Result<Self> {
        if jumps.dim() != schedule.dim() {
            return Err(Error::DimensionMismatch {
                expected: schedule.dim(),
                found: jumps.dim(),
            });
        }
        step_plan(t_i, t_f, step)?;
        Ok(Self {
            schedule,
            jumps,
            t_i,
            t_f,
            step,
        })
    }

    pub fn dim(&self) -> usize {
        self.schedule.dim()
    }

    pub fn with_interval(&self, t_i: f64, t_f: f64) -> Result<Self> {
        Self::new(self.schedule.clone(), self.jumps.clone(), t_i, t_f, self.step)
    }

    pub fn with_step(&self, step: f64) -> Result<Self> {
        Self::new(self.schedule.clone(), self.jumps.clone(), self.t_i, self.t_f, step)
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        propagate(&self.schedule, &self.jumps, rho, self.t_i, self.t_f, self.step)
    }

    /// Linear action on an arbitrary matrix `X = A + iK`, each Hermitian part
    /// integrated separately.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (a, _) = propagate_hermitian(
            &self.schedule,
            &self.jumps,
            &x.hermitian_part(),
            self.t_i,
            self.t_f,
            self.step,
        )?;
        let k = x.antihermitian_part();
        if k.max_abs() == 0.0 {
            return Ok(a);
        }
        let (k, _) = propagate_hermitian(&self.schedule, &self.jumps, &k, self.t_i, self.t_f, self.step)?;
        Ok(&a + &k.scale(I))
    }

    /// The `d² × d²` superoperator of the whole interval.
    pub fn superoperator(&self) -> Result<ComplexMatrix> {
        let mut out = self.superoperator_trajectory(&[self.t_f])?;
        Ok(out.pop().expect("one sample"))
    }

    /// Superoperators `S(t_i → t)` at each sample time (ascending, within `[t_i, t_f]`).
    /// Integration restarts its step grid at every sample so samples are hit exactly.
    pub fn superoperator_trajectory(&self, times: &[f64]) -> Result<Vec<ComplexMatrix>> {
        let d = self.dim();
        let gen = Generator::new(&self.schedule, &self.jumps);
        let mut s = ComplexMatrix::identity(d * d);
        let mut t = self.t_i;
        let mut out = Vec::with_capacity(times.len());
        for &target in times {
            if target < t || target > self.t_f + 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "sample time {target} out of order or range"
                )));
            }
            let (n, h) = step_plan(t, target, self.step)?;
            if n > 0 {
                if gen.is_autonomous() {
                    s = matrix_power(&rk4_step_matrix(&gen.fixed, h), n).matmul(&s);
                } else {
                    for k in 0..n {
                        s = rk4_step(&gen, t + k as f64 * h, h, &s);
                    }
                }
            }
            check_superoperator(&s, d, target)?;
            t = target;
            out.push(s.clone());
        }
        Ok(out)
    }

    /// Compares this step with half and quarter steps.
    pub fn convergence(&self) -> Result<ConvergenceReport> {
        let s1 = self.superoperator()?;
        let s2 = self.with_step(0.5 * self.step)?.superoperator()?;
        let s4 = self.with_step(0.25 * self.step)?.superoperator()?;
        let e1 = s1.max_abs_diff(&s4);
        let e2 = s2.max_abs_diff(&s4);
        Ok(ConvergenceReport {
            step: self.step,
            half_step_distance: s1.max_abs_diff(&s2),
            order_factor: if e2 > 0.0 { e1 / e2 } else { f64::INFINITY },
        })
    }
}
