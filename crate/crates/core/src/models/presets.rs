//! Named experiment configurations producing tabular results.

use std::fmt;
use std::str::FromStr;

use super::three_level::{
    ensemble, time_grid, DriveForm, Measurement, Occupation, ThreeLevelConfig, ThreeLevelDynamics, ThreeLevelRow,
};
use super::two_qubit::{closed_form_at_gate, two_qubit_sweep, ShotMode, SweepRow, TwoQubitConfig};
use crate::channels::DEFAULT_STEP;
use crate::error::{Error, Result};
use crate::qcore::{coherence_l1, DensityOperator};
use crate::sampling::random_density;

/// Spacing of the three-level output grid.
pub const SAMPLE_DT: f64 = 0.1;
/// Upper bound of the coherence scale; bisection then lands on the state-space boundary.
pub const COHERENCE_SCALE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Fig2Sweep,
    FigS2JarzynskiClosed,
    FigS2bJarzynskiOpen,
    FigS3SecondMoment,
    FigS4Entropy,
    FigS5MllSecondMoment,
    FigS6EntropyMll,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Fig2Sweep,
        Preset::FigS2JarzynskiClosed,
        Preset::FigS2bJarzynskiOpen,
        Preset::FigS3SecondMoment,
        Preset::FigS4Entropy,
        Preset::FigS5MllSecondMoment,
        Preset::FigS6EntropyMll,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Fig2Sweep => "fig2-sweep",
            Self::FigS2JarzynskiClosed => "figS2-jarzynski-closed",
            Self::FigS2bJarzynskiOpen => "figS2b-jarzynski-open",
            Self::FigS3SecondMoment => "figS3-second-moment",
            Self::FigS4Entropy => "figS4-entropy",
            Self::FigS5MllSecondMoment => "figS5-mll-second-moment",
            Self::FigS6EntropyMll => "figS6-entropy-mll",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Self::Fig2Sweep => "two-qubit controlled-gate sweep: characteristic functions at u = i*beta and moments",
            Self::FigS2JarzynskiClosed => "closed driven three-level system: Jarzynski functionals (beta = 0.6)",
            Self::FigS2bJarzynskiOpen => "open driven three-level system: Jarzynski functionals (beta = 0.5)",
            Self::FigS3SecondMoment => "coherence share of the EPM second moment over time",
            Self::FigS4Entropy => "Shannon entropy EPM - TPM over 1000 random states",
            Self::FigS5MllSecondMoment => "second moment MLL - EPM over 100 random states",
            Self::FigS6EntropyMll => "Shannon entropy EPM - MLL and EPM - TPM over 100 random states",
        }
    }

    pub fn is_three_level(&self) -> bool {
        !matches!(self, Self::Fig2Sweep)
    }

    fn default_ensemble(&self) -> usize {
        match self {
            Self::FigS3SecondMoment | Self::FigS4Entropy => 1000,
            Self::FigS5MllSecondMoment | Self::FigS6EntropyMll => 100,
            _ => 1,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown preset '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetOptions {
    pub seed: u64,
    pub shots: ShotMode,
    pub beta: Option<f64>,
    pub theta0: Option<f64>,
    pub occupation: Occupation,
    pub measurement: Measurement,
    pub step: f64,
    pub ensemble_size: Option<usize>,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            shots: ShotMode::Exact,
            beta: None,
            theta0: None,
            occupation: Occupation::Bose,
            measurement: Measurement::Full,
            step: DEFAULT_STEP,
            ensemble_size: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetOutput {
    pub preset: Preset,
    pub table: Table,
    pub scalars: Vec<(String, f64)>,
    /// Columns worth plotting against the first column.
    pub plot_columns: Vec<String>,
}

impl PresetOutput {
    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

pub fn run_preset(preset: Preset, opts: &PresetOptions) -> Result<PresetOutput> {
    if opts.ensemble_size == Some(0) {
        return Err(Error::InvalidConfig("ensemble_size must be at least 1".into()));
    }
    match preset {
        Preset::Fig2Sweep => fig2(opts),
        Preset::FigS2JarzynskiClosed => jarzynski_preset(preset, opts, 0.0, 0.6),
        Preset::FigS2bJarzynskiOpen => jarzynski_preset(preset, opts, 0.1, 0.5),
        Preset::FigS3SecondMoment => second_moment_preset(opts),
        Preset::FigS4Entropy => entropy_preset(opts),
        Preset::FigS5MllSecondMoment => mll_moment_preset(opts),
        Preset::FigS6EntropyMll => mll_entropy_preset(opts),
    }
}

const FIG2_COLUMNS: [&str; 13] = [
    "theta",
    "G_TPM",
    "G_EPM",
    "G_EPM_diag",
    "G_EPM_coh",
    "mean_EPM",
    "mean_TPM",
    "m2_EPM",
    "m2_TPM",
    "m3_EPM",
    "m3_TPM",
    "m4_EPM",
    "m4_TPM",
];

fn fig2_values(r: &SweepRow) -> Vec<f64> {
    let mut v = vec![r.theta, r.g_tpm, r.g_epm, r.g_epm_diag, r.g_epm_coh];
    for n in 0..4 {
        v.push(r.moments_epm[n]);
        v.push(r.moments_tpm[n]);
    }
    v
}

fn fig2(opts: &PresetOptions) -> Result<PresetOutput> {
    let cfg = TwoQubitConfig {
        beta: opts.beta,
        theta0: if opts.beta.is_some() {
            opts.theta0
        } else {
            opts.theta0.or(Some(super::two_qubit::DEFAULT_THETA0))
        },
        shots: opts.shots,
        seed: opts.seed,
        ..Default::default()
    };
    let (beta, theta0) = cfg.resolve()?;
    let rows = two_qubit_sweep(&cfg)?;
    let mut table = Table::new(&FIG2_COLUMNS);
    if opts.shots != ShotMode::Exact {
        for c in &FIG2_COLUMNS[1..] {
            table.columns.push(format!("{c}_se"));
        }
    }
    let mut tpm_dev: f64 = 0.0;
    let mut closed_dev: f64 = 0.0;
    for r in &rows {
        let mut v = fig2_values(r);
        if let Some(se) = &r.se {
            v.extend([se.g_tpm, se.g_epm, se.g_epm_diag, se.g_epm_coh]);
            for n in 0..4 {
                v.push(se.moments_epm[n]);
                v.push(se.moments_tpm[n]);
            }
        } else {
            let c = closed_form_at_gate(r.theta, beta, cfg.epsilon);
            for (a, b) in [
                (r.g_epm, c.g_epm),
                (r.g_epm_diag, c.g_epm_diag),
                (r.g_epm_coh, c.g_epm_coh),
            ] {
                closed_dev = closed_dev.max((a - b).abs());
            }
        }
        tpm_dev = tpm_dev.max((r.g_tpm - 1.0).abs());
        table.rows.push(v);
    }
    let mut scalars = vec![
        ("beta".to_string(), beta),
        ("theta0".to_string(), theta0),
        ("max_abs_G_TPM_minus_1".to_string(), tpm_dev),
    ];
    if opts.shots == ShotMode::Exact {
        scalars.push(("max_abs_closed_form_deviation".to_string(), closed_dev));
    }
    Ok(PresetOutput {
        preset: Preset::Fig2Sweep,
        table,
        scalars,
        plot_columns: ["G_TPM", "G_EPM", "G_EPM_diag", "G_EPM_coh"].map(String::from).to_vec(),
    })
}

fn three_level_config(opts: &PresetOptions, gamma: f64, drive: DriveForm) -> ThreeLevelConfig {
    ThreeLevelConfig {
        gamma,
        drive,
        step: opts.step,
        occupation: opts.occupation,
        measurement: opts.measurement,
        ..Default::default()
    }
}

fn dynamics(cfg: &ThreeLevelConfig) -> Result<ThreeLevelDynamics> {
    ThreeLevelDynamics::new(cfg, &time_grid(cfg.t_max, SAMPLE_DT))
}

fn jarzynski_preset(preset: Preset, opts: &PresetOptions, gamma: f64, default_beta: f64) -> Result<PresetOutput> {
    let beta = opts.beta.unwrap_or(default_beta);
    let dyn_ = dynamics(&three_level_config(opts, gamma, DriveForm::Complementary))?;
    let rho = dyn_.coherent_thermal_state(
        beta,
        COHERENCE_SCALE,
        &mut crate::sampling::SeededGenerator::new(opts.seed),
    )?;
    let rows = dyn_.evaluate(&rho, Some(beta))?;
    let mut table = Table::new(&["t", "jarzynski_TPM", "jarzynski_EPM", "diagonal_part", "coherence_part"]);
    let mut tpm_dev: f64 = 0.0;
    let mut split_dev: f64 = 0.0;
    for r in &rows {
        let j = r.jarzynski.expect("beta supplied");
        let tpm = r.jarzynski_tpm.expect("beta supplied");
        tpm_dev = tpm_dev.max((tpm - 1.0).abs());
        split_dev = split_dev.max((j.total - j.diagonal_part - j.coherence_part).abs());
        table
            .rows
            .push(vec![r.t, tpm, j.total, j.diagonal_part, j.coherence_part]);
    }
    Ok(PresetOutput {
        preset,
        table,
        scalars: vec![
            ("beta".into(), beta),
            ("gamma".into(), gamma),
            ("coherence_l1".into(), coherence_l1(&rho, dyn_.basis())?),
            ("max_abs_jarzynski_TPM_minus_1".into(), tpm_dev),
            ("max_abs_split_residual".into(), split_dev),
        ],
        plot_columns: ["jarzynski_TPM", "jarzynski_EPM", "diagonal_part", "coherence_part"]
            .map(String::from)
            .to_vec(),
    })
}

/// Initial inverse temperature for the second-moment preset.
pub const SECOND_MOMENT_BETA: f64 = 0.5;

fn second_moment_preset(opts: &PresetOptions) -> Result<PresetOutput> {
    let beta = opts.beta.unwrap_or(SECOND_MOMENT_BETA);
    let n = opts
        .ensemble_size
        .unwrap_or(Preset::FigS3SecondMoment.default_ensemble());
    let dyn_ = dynamics(&three_level_config(opts, 0.1, DriveForm::Complementary))?;
    let series = |rho: &DensityOperator| -> Result<Vec<(f64, f64, f64, f64)>> {
        (0..dyn_.times.len())
            .map(|i| {
                let s = dyn_.second_moment_split(rho, i)?;
                let f = if s.total.abs() > 1e-12 {
                    s.coherence_fraction()
                } else {
                    0.0
                };
                Ok((f, s.total, s.population_part, s.coherence_part))
            })
            .collect()
    };
    let single = dyn_.coherent_thermal_state(
        beta,
        COHERENCE_SCALE,
        &mut crate::sampling::SeededGenerator::new(opts.seed),
    )?;
    let single_series = series(&single)?;
    let all = ensemble(n, opts.seed, |_, g| {
        series(&dyn_.coherent_thermal_state(beta, COHERENCE_SCALE, g)?)
    })?;
    let mut table = Table::new(&[
        "t",
        "fraction",
        "m2_total",
        "m2_population",
        "m2_coherence",
        "fraction_min",
        "fraction_max",
    ]);
    let (mut best_single, mut best_env, mut t_env) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0);
    for (i, &t) in dyn_.times.iter().enumerate() {
        let (f, tot, pop, coh) = single_series[i];
        let lo = all.iter().map(|s| s[i].0).fold(f64::INFINITY, f64::min);
        let hi = all.iter().map(|s| s[i].0).fold(f64::NEG_INFINITY, f64::max);
        best_single = best_single.max(f);
        if hi > best_env {
            best_env = hi;
            t_env = t;
        }
        table.rows.push(vec![t, f, tot, pop, coh, lo, hi]);
    }
    Ok(PresetOutput {
        preset: Preset::FigS3SecondMoment,
        table,
        scalars: vec![
            ("beta".into(), beta),
            ("ensemble_size".into(), n as f64),
            ("max_fraction_single_state".into(), best_single),
            ("max_fraction_envelope".into(), best_env),
            ("t_of_max_fraction_envelope".into(), t_env),
        ],
        plot_columns: ["fraction", "fraction_min", "fraction_max"].map(String::from).to_vec(),
    })
}

/// Hilbert-Schmidt random states with their per-time rows, evaluated in parallel.
fn random_state_rows(dyn_: &ThreeLevelDynamics, n: usize, seed: u64) -> Result<Vec<(f64, Vec<ThreeLevelRow>)>> {
    ensemble(n, seed, |_, g| {
        let rho = random_density(3, 3, g)?;
        Ok((coherence_l1(&rho, dyn_.basis())?, dyn_.evaluate(&rho, None)?))
    })
}

type Quantity = (&'static str, fn(&ThreeLevelRow) -> f64);

/// Builds `t, <name>_min, <name>_max, <name>_<tag>...` columns from per-state series.
struct EnvelopeBuilder<'a> {
    data: &'a [(f64, Vec<ThreeLevelRow>)],
    picks: Vec<(String, usize)>,
}

impl<'a> EnvelopeBuilder<'a> {
    fn table(&self, times: &[f64], quantities: &[Quantity]) -> (Table, Vec<String>) {
        let mut cols = vec!["t".to_string()];
        let mut plot = Vec::new();
        for (name, _) in quantities {
            cols.push(format!("{name}_min"));
            cols.push(format!("{name}_max"));
            plot.push(format!("{name}_min"));
            plot.push(format!("{name}_max"));
            for (tag, _) in &self.picks {
                cols.push(format!("{name}_{tag}"));
                plot.push(format!("{name}_{tag}"));
            }
        }
        let mut rows = Vec::new();
        for (i, &t) in times.iter().enumerate() {
            let mut row = vec![t];
            for (_, f) in quantities {
                let vals: Vec<f64> = self.data.iter().map(|(_, s)| f(&s[i])).collect();
                row.push(vals.iter().copied().fold(f64::INFINITY, f64::min));
                row.push(vals.iter().copied().fold(f64::NEG_INFINITY, f64::max));
                for (_, k) in &self.picks {
                    row.push(vals[*k]);
                }
            }
            rows.push(row);
        }
        (Table { columns: cols, rows }, plot)
    }
}

fn argmin_max(v: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[lo] {
            lo = i;
        }
        if *x > v[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

fn entropy_preset(opts: &PresetOptions) -> Result<PresetOutput> {
    let n = opts.ensemble_size.unwrap_or(Preset::FigS4Entropy.default_ensemble());
    let dyn_ = dynamics(&three_level_config(opts, 0.1, DriveForm::DoubleFrequency))?;
    let data = random_state_rows(&dyn_, n, opts.seed)?;
    let c: Vec<f64> = data.iter().map(|d| d.0).collect();
    let (lo, hi) = argmin_max(&c);
    let b = EnvelopeBuilder {
        data: &data,
        picks: vec![("lowC".into(), lo), ("highC".into(), hi)],
    };
    let (table, plot) = b.table(
        &dyn_.times,
        &[
            ("dH_populations", |r| r.h_epm_populations - r.h_tpm),
            ("dH", |r| r.h_epm - r.h_tpm),
        ],
    );
    let min_pop = table
        .column("dH_populations_min")
        .unwrap()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let min_full = table
        .column("dH_min")
        .unwrap()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(PresetOutput {
        preset: Preset::FigS4Entropy,
        table,
        scalars: vec![
            ("ensemble_size".into(), n as f64),
            ("coherence_l1_lowest".into(), c[lo]),
            ("coherence_l1_highest".into(), c[hi]),
            ("min_dH_populations".into(), min_pop),
            ("min_dH".into(), min_full),
        ],
        plot_columns: plot,
    })
}

fn mll_moment_preset(opts: &PresetOptions) -> Result<PresetOutput> {
    let n = opts
        .ensemble_size
        .unwrap_or(Preset::FigS5MllSecondMoment.default_ensemble());
    let dyn_ = dynamics(&three_level_config(opts, 0.1, DriveForm::Complementary))?;
    let data = random_state_rows(&dyn_, n, opts.seed)?;
    let b = EnvelopeBuilder {
        data: &data,
        picks: vec![("example".into(), 0)],
    };
    let (table, plot) = b.table(
        &dyn_.times,
        &[
            ("dm2_MLL_EPM", |r| r.m2_mll - r.m2_epm),
            ("m2_coherence", |r| r.second_moment.coherence_part),
        ],
    );
    let frac_pos = data
        .iter()
        .flat_map(|(_, s)| s.iter().map(|r| r.m2_mll - r.m2_epm))
        .filter(|d| *d > 1e-12)
        .count() as f64
        / (data.len() * dyn_.times.len()) as f64;
    Ok(PresetOutput {
        preset: Preset::FigS5MllSecondMoment,
        table,
        scalars: vec![
            ("ensemble_size".into(), n as f64),
            ("share_of_samples_with_MLL_above_EPM".into(), frac_pos),
        ],
        plot_columns: plot,
    })
}

fn mll_entropy_preset(opts: &PresetOptions) -> Result<PresetOutput> {
    let n = opts.ensemble_size.unwrap_or(Preset::FigS6EntropyMll.default_ensemble());
    let dyn_ = dynamics(&three_level_config(opts, 0.1, DriveForm::Complementary))?;
    let data = random_state_rows(&dyn_, n, opts.seed)?;
    let b = EnvelopeBuilder {
        data: &data,
        picks: vec![("example".into(), 0)],
    };
    let (table, plot) = b.table(
        &dyn_.times,
        &[
            ("dH_EPM_MLL", |r| r.h_epm - r.h_mll),
            ("dH_EPM_TPM", |r| r.h_epm - r.h_tpm),
        ],
    );
    let min_mll = table
        .column("dH_EPM_MLL_min")
        .unwrap()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(PresetOutput {
        preset: Preset::FigS6EntropyMll,
        table,
        scalars: vec![("ensemble_size".into(), n as f64), ("min_dH_EPM_MLL".into(), min_mll)],
        plot_columns: plot,
    })
}
