//! The acceptance suite: eleven criteria, each with pinned tolerances and a
//! wall-clock budget.

use std::time::{Duration, Instant};

use fluctua_core::channels::{check_cptp, propagate_hermitian, QuantumChannel};
use fluctua_core::models::three_level::{three_level_model, three_level_propagator};
use fluctua_core::models::two_qubit::{closed_form_at_gate, TwoQubitSetup};
use fluctua_core::models::{
    run_preset, two_qubit_sweep, DriveForm, Occupation, Preset, PresetOptions, ThreeLevelConfig, ThreeLevelDynamics,
    TwoQubitConfig,
};
use fluctua_core::protocols::*;
use fluctua_core::qcore::*;
use fluctua_core::sampling::*;
use fluctua_core::Result;
use rayon::prelude::*;

pub const TPM_UNITY_TOL: f64 = 1e-9;
pub const CLOSED_FORM_TOL: f64 = 1e-9;
pub const SPOT_BETA: f64 = 0.443;
pub const SPOT_VALUE: f64 = 1.37632;
pub const SPOT_TOL: f64 = 1e-4;
pub const COLLAPSE_TOL: f64 = 1e-10;
pub const WITNESS_MIN_TV: f64 = 1e-6;
pub const MOMENT_TOL: f64 = 1e-9;
pub const COHERENCE_ZERO_TOL: f64 = 1e-10;
pub const MARGINAL_TOL: f64 = 1e-10;
pub const INFO_EQUALITY_TOL: f64 = 1e-10;
pub const RECOVERY_TOL: f64 = 1e-12;
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
pub const CHOI_MIN_EIG: f64 = -1e-5;
pub const MIN_ORDER_FACTOR: f64 = 12.0;
pub const GIBBS_DISTANCE_TOL: f64 = 1e-6;
pub const GIBBS_TV_TOL: f64 = 1e-3;
pub const GIBBS_BETA: f64 = 1.0;
pub const MIN_COHERENCE_FRACTION: f64 = 0.3;
pub const SHOTS: usize = 2048;
pub const SHOT_SIGMAS: f64 = 3.0;
pub const SHOT_SEEDS: u64 = 20;
pub const MIN_SEED_SHARE: f64 = 0.95;
pub const CONVEXITY_MIN_TV: f64 = 1e-6;

const INSTANCES: usize = 100;
const RECOVERY_INSTANCES: usize = 50;
const DIMS: [usize; 3] = [2, 3, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Skipped => "SKIP",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {:>8.3}s / {:>3}s  {}",
            self.status.as_str(),
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

/// Knobs the `check` command exposes.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceOptions {
    pub step: f64,
    pub occupation: Occupation,
    pub seed: u64,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        Self {
            step: fluctua_core::channels::DEFAULT_STEP,
            occupation: Occupation::Bose,
            seed: 0,
        }
    }
}

enum Verdict {
    Checked(bool, String),
    Skipped(String),
}

type Check = fn(&AcceptanceOptions) -> Result<Verdict>;

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub budget: Duration,
    check: Check,
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, name, secs, check: Check| Criterion {
        id,
        name,
        budget: Duration::from_secs(secs),
        check,
    };
    vec![
        c(1, "tpm-jarzynski-identity", 1, tpm_identity),
        c(2, "closed-form-match", 1, closed_form_match),
        c(3, "protocol-collapse", 10, protocol_collapse),
        c(4, "moment-identities", 10, moment_identities),
        c(5, "entropy-and-marginals", 10, entropy_marginals),
        c(6, "tpm-recovery", 5, tpm_recovery_check),
        c(7, "lindblad-integrity", 30, lindblad_integrity),
        c(8, "gibbs-relaxation", 30, gibbs_relaxation),
        c(9, "coherence-second-moment", 60, coherence_fraction),
        c(10, "finite-shot-estimator", 30, finite_shots),
        c(11, "non-convexity-witness", 5, convexity),
    ]
}

impl Criterion {
    pub fn run(&self, opts: &AcceptanceOptions) -> CriterionOutcome {
        let start = Instant::now();
        let verdict = (self.check)(opts);
        let elapsed = start.elapsed();
        let (status, detail) = match verdict {
            Ok(Verdict::Skipped(why)) => (Status::Skipped, why),
            Ok(Verdict::Checked(_, detail)) if elapsed >= self.budget => {
                (Status::Fail, format!("{detail}; over runtime budget"))
            }
            Ok(Verdict::Checked(ok, detail)) => (if ok { Status::Pass } else { Status::Fail }, detail),
            Err(e) => (Status::Fail, format!("error: {e}")),
        };
        CriterionOutcome {
            id: self.id,
            name: self.name,
            status,
            detail,
            elapsed,
            budget: self.budget,
        }
    }
}

/// Runs every criterion in order; criteria run one at a time so that each
/// runtime is measured without contention.
pub fn run_all(opts: &AcceptanceOptions) -> Vec<CriterionOutcome> {
    criteria().iter().map(|c| c.run(opts)).collect()
}

pub fn all_passed(outcomes: &[CriterionOutcome]) -> bool {
    outcomes.iter().all(|o| o.status != Status::Fail)
}

fn checked(ok: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict::Checked(ok, detail))
}

fn tpm_identity(_: &AcceptanceOptions) -> Result<Verdict> {
    let rows = two_qubit_sweep(&TwoQubitConfig::default())?;
    let worst = rows.iter().map(|r| (r.g_tpm - 1.0).abs()).fold(0.0, f64::max);
    checked(
        rows.len() == 21 && worst < TPM_UNITY_TOL,
        format!("{} points, max |G_TPM - 1| = {worst:.2e}", rows.len()),
    )
}

fn closed_form_match(_: &AcceptanceOptions) -> Result<Verdict> {
    let cfg = TwoQubitConfig::default();
    let (beta, _) = cfg.resolve()?;
    let mut worst: f64 = 0.0;
    for r in two_qubit_sweep(&cfg)? {
        let c = closed_form_at_gate(r.theta, beta, cfg.epsilon);
        for d in [
            r.g_epm - c.g_epm,
            r.g_epm_diag - c.g_epm_diag,
            r.g_epm_coh - c.g_epm_coh,
        ] {
            worst = worst.max(d.abs());
        }
    }
    let spot_cfg = TwoQubitConfig {
        beta: Some(SPOT_BETA),
        theta0: None,
        theta_grid: vec![0.0],
        ..Default::default()
    };
    let spot = two_qubit_sweep(&spot_cfg)?[0].g_epm;
    let spot_closed = closed_form_at_gate(0.0, SPOT_BETA, 1.0).g_epm;
    checked(
        worst < CLOSED_FORM_TOL && (spot - SPOT_VALUE).abs() < SPOT_TOL && (spot_closed - SPOT_VALUE).abs() < SPOT_TOL,
        format!("max deviation {worst:.2e}; G_EPM(i*{SPOT_BETA}) at 0 = {spot:.6}"),
    )
}

/// A random problem: dimension cycles through 2, 3, 4; the channel alternates
/// between unitary and general CPTP.
struct Instance {
    gen: SeededGenerator,
    channel: QuantumChannel,
    spec_i: SpectralDecomposition,
    spec_f: SpectralDecomposition,
}

fn instance(k: usize, seed: u64) -> Result<Instance> {
    let d = DIMS[k % DIMS.len()];
    let mut gen = SeededGenerator::new(child_seed(seed, k as u64));
    let channel = if k.is_multiple_of(2) {
        QuantumChannel::unitary(random_unitary(d, &mut gen))?
    } else {
        random_channel(d, 1 + gen.index(d * d), &mut gen)?
    };
    let spec_i = SpectralDecomposition::new(&random_hermitian(d, &mut gen))?;
    let spec_f = SpectralDecomposition::new(&random_hermitian(d, &mut gen))?;
    Ok(Instance {
        gen,
        channel,
        spec_i,
        spec_f,
    })
}

impl Instance {
    fn dim(&self) -> usize {
        self.spec_i.dim()
    }

    fn joint(&self, p: Protocol, rho: &DensityOperator) -> Result<JointEnergyDistribution> {
        joint(p, rho, &self.channel, &self.spec_i, &self.spec_f)
    }

    fn tv(&self, p: Protocol, q: Protocol, rho: &DensityOperator) -> Result<f64> {
        tv_distance_joint(&self.joint(p, rho)?, &self.joint(q, rho)?)
    }
}

fn max_over<F>(n: usize, seed: u64, f: F) -> Result<f64>
where
    F: Fn(usize, u64) -> Result<f64> + Sync,
{
    let v = (0..n)
        .into_par_iter()
        .map(|k| f(k, seed))
        .collect::<Result<Vec<f64>>>()?;
    Ok(v.into_iter().fold(0.0, f64::max))
}

fn protocol_collapse(opts: &AcceptanceOptions) -> Result<Verdict> {
    let pure = max_over(INSTANCES, opts.seed, |k, s| {
        let mut x = instance(k, s)?;
        let rho = DensityOperator::from_pure(&haar_random_pure(x.dim(), &mut x.gen))?;
        x.tv(Protocol::Epm, Protocol::Mll, &rho)
    })?;
    let diagonal = max_over(INSTANCES, opts.seed.wrapping_add(1), |k, s| {
        let mut x = instance(k, s)?;
        let rho = dephase_sectors(&random_density(x.dim(), x.dim(), &mut x.gen)?, &x.spec_i)?;
        x.tv(Protocol::Mll, Protocol::Tpm, &rho)
    })?;
    let eigen = max_over(INSTANCES, opts.seed.wrapping_add(2), |k, s| {
        let mut x = instance(k, s)?;
        let l = x.gen.index(x.dim());
        let rho = DensityOperator::from_pure(&x.spec_i.eigen().vector(l))?;
        Ok(x.tv(Protocol::Epm, Protocol::Tpm, &rho)?
            .max(x.tv(Protocol::Epm, Protocol::Mll, &rho)?))
    })?;
    // Incoherent, not an eigenstate, and a channel that correlates the two outcomes.
    let sz = SpectralDecomposition::new(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0]))?;
    let flip = QuantumChannel::unitary(ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]))?;
    let rho = DensityOperator::from_probabilities(&[0.7, 0.3])?;
    let witness = tv_distance_joint(&epm_joint(&rho, &flip, &sz, &sz)?, &tpm_joint(&rho, &flip, &sz, &sz)?)?;
    checked(
        pure < COLLAPSE_TOL && diagonal < COLLAPSE_TOL && eigen < COLLAPSE_TOL && witness > WITNESS_MIN_TV,
        format!("TV pure {pure:.1e}, diagonal {diagonal:.1e}, eigenstate {eigen:.1e}; witness {witness:.3}"),
    )
}

fn moment_identities(opts: &AcceptanceOptions) -> Result<Verdict> {
    let results = (0..INSTANCES)
        .into_par_iter()
        .map(|k| {
            let mut x = instance(k, opts.seed)?;
            let rho = random_density(x.dim(), x.dim(), &mut x.gen)?;
            let expect = mean_energy_change(&rho, &x.channel, &x.spec_i, &x.spec_f)?;
            let mut mean_err: f64 = 0.0;
            for p in [Protocol::Epm, Protocol::Mll] {
                mean_err = mean_err.max((delta_distribution(&x.joint(p, &rho)?, None).mean() - expect).abs());
            }
            let split = epm_second_moment_split(&rho, &x.channel, &x.spec_i, &x.spec_f, &Dephasing::EnergySectors)?;
            let m2 = delta_distribution(&x.joint(Protocol::Epm, &rho)?, None).moment(2);
            let split_err = (split.population_part + split.coherence_part - m2).abs();
            let p = dephase_sectors(&rho, &x.spec_i)?;
            let coh = epm_second_moment_split(&p, &x.channel, &x.spec_i, &x.spec_f, &Dephasing::EnergySectors)?
                .coherence_part
                .abs();
            let g_coh = characteristic_split(
                &p,
                &x.channel,
                &x.spec_i,
                &x.spec_f,
                C64::new(0.7, 0.0),
                &Dephasing::EnergySectors,
            )?
            .coherence
            .norm();
            Ok([mean_err, split_err, coh.max(g_coh)])
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = |i: usize| results.iter().map(|r| r[i]).fold(0.0, f64::max);
    let (m, s, c) = (worst(0), worst(1), worst(2));
    checked(
        m < MOMENT_TOL && s < MOMENT_TOL && c < COHERENCE_ZERO_TOL,
        format!("mean {m:.1e}, second-moment split {s:.1e}, incoherent coherence part {c:.1e}"),
    )
}

fn entropy_marginals(opts: &AcceptanceOptions) -> Result<Verdict> {
    let results = (0..INSTANCES)
        .into_par_iter()
        .map(|k| {
            let mut gen = SeededGenerator::new(child_seed(opts.seed, k as u64));
            let spec_i = SpectralDecomposition::new(&random_hermitian(3, &mut gen))?;
            let spec_f = SpectralDecomposition::new(&random_hermitian(3, &mut gen))?;
            let channel = if k.is_multiple_of(2) {
                QuantumChannel::unitary(random_unitary(3, &mut gen))?
            } else {
                random_channel(3, 1 + gen.index(9), &mut gen)?
            };
            let pure = k % 4 < 2;
            let rho = random_density(3, if pure { 1 } else { 3 }, &mut gen)?;
            let p = dephase_sectors(&rho, &spec_i)?;
            let epm_p = epm_joint(&p, &channel, &spec_i, &spec_f)?;
            let tpm_p = tpm_joint(&p, &channel, &spec_i, &spec_f)?;
            let prod = JointEnergyDistribution::product(
                &spec_i,
                &tpm_p.initial_marginal(),
                &spec_f,
                &tpm_p.final_marginal(),
                Protocol::Epm,
            )?;
            let marg = tv_distance_joint(&epm_p, &prod)?;
            let h_order = shannon_entropy(&tpm_p) <= shannon_entropy(&epm_p) + 1e-12;
            let epm = epm_joint(&rho, &channel, &spec_i, &spec_f)?;
            let mll = mll_joint(&rho, &channel, &spec_i, &spec_f)?;
            let mll_order = shannon_entropy(&mll) <= shannon_entropy(&epm) + 1e-12;
            let info = mutual_information(&mll, &epm)?;
            let info_ok = info >= -INFO_EQUALITY_TOL && (info.abs() < INFO_EQUALITY_TOL) == pure;
            Ok((marg, h_order && mll_order, info_ok))
        })
        .collect::<Result<Vec<_>>>()?;
    let marg = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let order_fail = results.iter().filter(|r| !r.1).count();
    let info_fail = results.iter().filter(|r| !r.2).count();
    checked(
        marg < MARGINAL_TOL && order_fail == 0 && info_fail == 0,
        format!("product-of-marginals {marg:.1e}; entropy-order violations {order_fail}; information violations {info_fail}"),
    )
}

fn tpm_recovery_check(opts: &AcceptanceOptions) -> Result<Verdict> {
    let worst = max_over(RECOVERY_INSTANCES, opts.seed, |k, s| {
        let mut x = instance(k, s)?;
        let rho = random_density(x.dim(), x.dim(), &mut x.gen)?;
        let rec = tpm_recovery(&rho, &x.channel, &x.spec_i, &x.spec_f)?;
        tv_distance_joint(&rec, &x.joint(Protocol::Tpm, &rho)?)
    })?;
    checked(
        worst < RECOVERY_TOL,
        format!("max TV {worst:.1e} over {RECOVERY_INSTANCES} instances"),
    )
}

fn figs3_config(opts: &AcceptanceOptions) -> ThreeLevelConfig {
    ThreeLevelConfig {
        step: opts.step,
        occupation: opts.occupation,
        ..Default::default()
    }
}

fn lindblad_integrity(opts: &AcceptanceOptions) -> Result<Verdict> {
    let cfg = figs3_config(opts);
    let prop = three_level_propagator(&cfg, cfg.t_max)?;
    let report = check_cptp(&prop.superoperator()?, TRACE_DRIFT_TOL)?;
    let (schedule, jumps) = three_level_model(&cfg)?;
    let rho0 = random_density(3, 3, &mut SeededGenerator::new(opts.seed))?;
    let (_, state_drift) = propagate_hermitian(&schedule, &jumps, rho0.matrix(), 0.0, cfg.t_max, cfg.step)?;
    let drift = report.trace_defect.max(state_drift);
    let conv = prop.convergence()?;
    checked(
        drift < TRACE_DRIFT_TOL && report.choi_min_eig > CHOI_MIN_EIG && conv.order_factor >= MIN_ORDER_FACTOR,
        format!(
            "step {:e}: trace drift {drift:.1e}, Choi min eig {:.1e}, order factor {:.2}",
            cfg.step, report.choi_min_eig, conv.order_factor
        ),
    )
}

fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(0.5
        * hermitian_eig(&(a - b).hermitian_part())?
            .values
            .iter()
            .map(|v| v.abs())
            .sum::<f64>())
}

fn gibbs_relaxation(opts: &AcceptanceOptions) -> Result<Verdict> {
    if opts.occupation != Occupation::Bose {
        return Ok(Verdict::Skipped(format!(
            "occupation '{}' has no Gibbs fixed point",
            opts.occupation.as_str()
        )));
    }
    let base = ThreeLevelConfig::default();
    let t_end = 200.0 / base.gamma;
    let cfg = ThreeLevelConfig {
        beta1: GIBBS_BETA,
        beta2: GIBBS_BETA,
        beta3: GIBBS_BETA,
        drive: DriveForm::Off,
        t_max: t_end,
        ..figs3_config(opts)
    };
    let dyn_ = ThreeLevelDynamics::new(&cfg, &[t_end])?;
    let (ch, sf) = (&dyn_.channels[0], &dyn_.spec_f[0]);
    let gibbs = gibbs_state(&SpectralDecomposition::new(&cfg.bare_hamiltonian())?, GIBBS_BETA).0;
    let mut gen = SeededGenerator::new(opts.seed);
    let (mut dist, mut tv, mut dh): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for rank in [1, 2, 3, 3] {
        let rho = random_density(3, rank, &mut gen)?;
        dist = dist.max(trace_distance(ch.apply(&rho)?.matrix(), gibbs.matrix())?);
        let joints = Protocol::ALL
            .iter()
            .map(|p| joint(*p, &rho, ch, &dyn_.spec_i, sf))
            .collect::<Result<Vec<_>>>()?;
        let deltas: Vec<_> = joints.iter().map(|j| delta_distribution(j, None)).collect();
        for a in 0..3 {
            for b in a + 1..3 {
                tv = tv.max(tv_distance_delta(&deltas[a], &deltas[b]));
            }
        }
        dh = dh.max((shannon_entropy(&joints[0]) - shannon_entropy(&joints[1])).abs());
    }
    checked(
        dist < GIBBS_DISTANCE_TOL && tv < GIBBS_TV_TOL && dh < GIBBS_TV_TOL,
        format!("t = {t_end}: trace distance {dist:.1e}, protocol TV {tv:.1e}, |H_EPM - H_TPM| {dh:.1e}"),
    )
}

fn coherence_fraction(opts: &AcceptanceOptions) -> Result<Verdict> {
    let out = run_preset(
        Preset::FigS3SecondMoment,
        &PresetOptions {
            seed: opts.seed,
            step: opts.step,
            occupation: opts.occupation,
            ..Default::default()
        },
    )?;
    let env = out.scalar("max_fraction_envelope").unwrap_or(f64::NAN);
    let single = out.scalar("max_fraction_single_state").unwrap_or(f64::NAN);
    let n = out.scalar("ensemble_size").unwrap_or(f64::NAN);
    checked(
        env >= MIN_COHERENCE_FRACTION,
        format!(
            "envelope max {env:.3} over {n} seeded states (seed-{} state alone {single:.3})",
            opts.seed
        ),
    )
}

fn finite_shots(_: &AcceptanceOptions) -> Result<Verdict> {
    let cfg = TwoQubitConfig::default();
    let setup = TwoQubitSetup::new(&cfg)?;
    let misses = (1..=SHOT_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let mut misses = 0usize;
            for (n, &theta) in cfg.theta_grid.iter().enumerate() {
                let ch = setup.channel(theta, cfg.phi, cfg.lambda)?;
                let s = child_seed(seed, n as u64);
                let shots = sample_shot_outcomes(&setup.rho, &ch, &setup.spec, &setup.spec, Protocol::Tpm, SHOTS, s)?;
                let est = estimate_exponential(&shots, setup.beta, BOOTSTRAP_RESAMPLES, child_seed(s, 1));
                if !est.within(1.0, SHOT_SIGMAS) {
                    log::info!("seed {seed}, theta {theta:.4}: {:.6} +- {:.2e}", est.value, est.se);
                    misses += 1;
                }
            }
            Ok(misses)
        })
        .collect::<Result<Vec<usize>>>()?;
    let good = misses.iter().filter(|m| **m == 0).count();
    let share = good as f64 / SHOT_SEEDS as f64;
    let points = cfg.theta_grid.len();
    checked(
        share >= MIN_SEED_SHARE,
        format!(
            "{good}/{SHOT_SEEDS} seeds within {SHOT_SIGMAS} SE at all {points} points ({} of {} points outside)",
            misses.iter().sum::<usize>(),
            points * SHOT_SEEDS as usize
        ),
    )
}

fn convexity(opts: &AcceptanceOptions) -> Result<Verdict> {
    let sz = SpectralDecomposition::new(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0]))?;
    let best = max_over(INSTANCES, opts.seed, |k, s| {
        let mut g = SeededGenerator::new(child_seed(s, k as u64));
        let r1 = random_density(2, 2, &mut g)?;
        let r2 = random_density(2, 2, &mut g)?;
        let ch = QuantumChannel::unitary(random_unitary(2, &mut g))?;
        convexity_witness(&r1, &r2, g.uniform(), &ch, &sz, &sz)
    })?;
    checked(
        best > CONVEXITY_MIN_TV,
        format!("largest TV gap {best:.3e} over {INSTANCES} pairs"),
    )
}
