//! Executes a preset and writes `results.csv`, `summary.json` and `plot.svg`.

use std::fs;
use std::path::{Path, PathBuf};

use fluctua_core::models::{run_preset, Preset, PresetOutput};
use serde_json::{json, Map, Value};

use crate::acceptance::{self, AcceptanceOptions, CriterionOutcome};
use crate::config::RunConfig;
use crate::format::{csv, CSV_DIGITS};
use crate::svg::{line_chart, Series};
use crate::CliError;

/// Paths of the written artifacts.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub plot: PathBuf,
}

fn tolerances() -> Value {
    json!({
        "csv_significant_digits": CSV_DIGITS,
        "hermiticity": fluctua_core::channels::HERMITIAN_TOL,
        "trace_failure": fluctua_core::channels::TRACE_FAILURE_TOL,
        "probability_clamp": fluctua_core::protocols::CLAMP_TOL,
        "normalization": fluctua_core::protocols::NORMALIZATION_TOL,
        "mll_eigenvalue_cutoff": fluctua_core::protocols::MLL_EIGENVALUE_CUTOFF,
        "delta_e_merge_factor": fluctua_core::protocols::DEFAULT_MERGE_FACTOR,
        "bootstrap_resamples": fluctua_core::protocols::BOOTSTRAP_RESAMPLES,
    })
}

fn outcome_json(o: &CriterionOutcome) -> Value {
    json!({
        "id": o.id,
        "name": o.name,
        "status": o.status.as_str(),
        "detail": o.detail,
        "seconds": o.elapsed.as_secs_f64(),
        "budget_seconds": o.budget.as_secs(),
    })
}

pub fn summary(cfg: &RunConfig, out: &PresetOutput, check: Option<&[CriterionOutcome]>) -> Value {
    let scalars: Map<String, Value> = out.scalars.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let mut s = json!({
        "preset": out.preset.name(),
        "description": out.preset.description(),
        "config": cfg,
        "columns": out.table.columns,
        "rows": out.table.rows.len(),
        "scalars": scalars,
        "tolerances": tolerances(),
    });
    if let Some(c) = check {
        s["check"] = Value::Array(c.iter().map(outcome_json).collect());
    }
    s
}

pub fn plot(out: &PresetOutput) -> String {
    let x = out.table.column(&out.table.columns[0]).unwrap_or_default();
    let series: Vec<Series<'_>> = out
        .plot_columns
        .iter()
        .filter_map(|c| {
            Some(Series {
                label: c,
                y: out.table.column(c)?,
            })
        })
        .collect();
    line_chart(out.preset.name(), &out.table.columns[0], &x, &series)
}

pub fn write_artifacts(
    dir: &Path,
    cfg: &RunConfig,
    out: &PresetOutput,
    check: Option<&[CriterionOutcome]>,
) -> Result<Artifacts, CliError> {
    fs::create_dir_all(dir)?;
    let a = Artifacts {
        csv: dir.join("results.csv"),
        summary: dir.join("summary.json"),
        plot: dir.join("plot.svg"),
    };
    fs::write(&a.csv, csv(&out.table.columns, &out.table.rows))?;
    let text = serde_json::to_string_pretty(&summary(cfg, out, check)).map_err(|e| CliError::Config(e.to_string()))?;
    fs::write(&a.summary, text + "\n")?;
    fs::write(&a.plot, plot(out))?;
    Ok(a)
}

/// Computes the preset, optionally runs the acceptance suite with the same
/// numerical settings, then writes all artifacts in one pass.
pub fn run(cfg: &RunConfig) -> Result<(Artifacts, Option<Vec<CriterionOutcome>>), CliError> {
    let preset: Preset = cfg.preset()?;
    let opts = cfg.preset_options()?;
    log::info!("running {preset}");
    let out = run_preset(preset, &opts)?;
    let check = cfg.check.then(|| {
        acceptance::run_all(&AcceptanceOptions {
            step: opts.step,
            occupation: opts.occupation,
            seed: opts.seed,
        })
    });
    let artifacts = write_artifacts(&cfg.output_dir, cfg, &out, check.as_deref())?;
    Ok((artifacts, check))
}
