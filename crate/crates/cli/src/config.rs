//! Run configuration: a flat `key = value` file overlaid with command-line flags.
//!
//! Recognised keys: `experiment`, `output_dir`, `seed`, `shots`, `beta`,
//! `theta0`, `occupation`, `measurement`, `step`, `ensemble_size`, `check`.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fluctua_core::channels::DEFAULT_STEP;
use fluctua_core::models::{Measurement, Occupation, Preset, PresetOptions, ShotMode};
use serde::Serialize;

use crate::CliError;

pub const KEYS: [&str; 11] = [
    "experiment",
    "output_dir",
    "seed",
    "shots",
    "beta",
    "theta0",
    "occupation",
    "measurement",
    "step",
    "ensemble_size",
    "check",
];

pub const DEFAULT_OUTPUT_DIR: &str = "results";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: String,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// `"exact"` or a shot count.
    pub shots: String,
    pub beta: Option<f64>,
    pub theta0: Option<f64>,
    pub occupation: String,
    pub measurement: String,
    pub step: f64,
    pub ensemble_size: Option<usize>,
    pub check: bool,
}

/// Raw string values keyed by name; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides(BTreeMap<String, String>);

impl Overrides {
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), CliError> {
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown key '{key}'")));
        }
        self.0.insert(key.to_string(), value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn merge(mut self, other: Overrides) -> Self {
        self.0.extend(other.0);
        self
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut out = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            let k = k.trim();
            if out.0.contains_key(k) {
                return Err(CliError::Config(format!("line {}: duplicate key '{k}'", n + 1)));
            }
            out.set(k, v.trim())
                .map_err(|e| CliError::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse '{v}'")))
}

pub fn parse_shots(v: &str) -> Result<ShotMode, CliError> {
    if v.eq_ignore_ascii_case("exact") {
        return Ok(ShotMode::Exact);
    }
    match v.parse::<usize>() {
        Ok(0) | Err(_) => Err(CliError::Config(format!(
            "shots: expected a positive count or 'exact', got '{v}'"
        ))),
        Ok(n) => Ok(ShotMode::Shots(n)),
    }
}

fn positive(key: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Config(format!("{key} must be positive and finite, got {x}")))
    }
}

impl RunConfig {
    pub fn from_overrides(o: &Overrides) -> Result<Self, CliError> {
        let experiment = o
            .get("experiment")
            .ok_or_else(|| CliError::Config("no experiment given (positional preset or 'experiment' key)".into()))?
            .to_string();
        experiment.parse::<Preset>()?;
        let cfg = Self {
            output_dir: PathBuf::from(o.get("output_dir").unwrap_or(DEFAULT_OUTPUT_DIR)),
            seed: o.get("seed").map(|v| parse_num("seed", v)).transpose()?.unwrap_or(0),
            shots: o.get("shots").unwrap_or("exact").to_string(),
            beta: o.get("beta").map(|v| parse_num("beta", v)).transpose()?,
            theta0: o.get("theta0").map(|v| parse_num("theta0", v)).transpose()?,
            occupation: o.get("occupation").unwrap_or("bose").to_string(),
            measurement: o.get("measurement").unwrap_or("full").to_string(),
            step: o
                .get("step")
                .map(|v| parse_num("step", v))
                .transpose()?
                .unwrap_or(DEFAULT_STEP),
            ensemble_size: o
                .get("ensemble_size")
                .map(|v| parse_num("ensemble_size", v))
                .transpose()?,
            check: o
                .get("check")
                .map(|v| parse_num("check", v))
                .transpose()?
                .unwrap_or(false),
            experiment,
        };
        cfg.preset_options()?;
        Ok(cfg)
    }

    pub fn preset(&self) -> Result<Preset, CliError> {
        Ok(self.experiment.parse()?)
    }

    /// Validated options for the core runner.
    pub fn preset_options(&self) -> Result<PresetOptions, CliError> {
        let preset = self.preset()?;
        let shots = parse_shots(&self.shots)?;
        if shots != ShotMode::Exact && preset != Preset::Fig2Sweep {
            return Err(CliError::Config(format!("{preset} supports only exact evaluation")));
        }
        if let Some(b) = self.beta {
            positive("beta", b)?;
        }
        if let Some(t) = self.theta0 {
            if !(t.is_finite() && t > 0.0 && t < std::f64::consts::PI) {
                return Err(CliError::Config(format!("theta0 must lie in (0, pi), got {t}")));
            }
            if preset != Preset::Fig2Sweep {
                return Err(CliError::Config(format!(
                    "theta0 applies only to fig2-sweep, not {preset}"
                )));
            }
        }
        if self.ensemble_size == Some(0) {
            return Err(CliError::Config("ensemble_size must be at least 1".into()));
        }
        Ok(PresetOptions {
            seed: self.seed,
            shots,
            beta: self.beta,
            theta0: self.theta0,
            occupation: self.occupation.parse::<Occupation>()?,
            measurement: self.measurement.parse::<Measurement>()?,
            step: positive("step", self.step)?,
            ensemble_size: self.ensemble_size,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = Overrides::parse("# comment\nexperiment = fig2-sweep\nseed = 3\n\nshots=exact\n").unwrap();
        let mut flags = Overrides::default();
        flags.set("seed", "9").unwrap();
        let cfg = RunConfig::from_overrides(&file.merge(flags)).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.preset_options().unwrap().shots, ShotMode::Exact);
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected() {
        assert!(Overrides::parse("colour = red").is_err());
        assert!(Overrides::parse("seed = 1\nseed = 2").is_err());
        assert!(Overrides::parse("just text").is_err());
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let mk = |extra: &str| Overrides::parse(&format!("experiment = fig2-sweep\n{extra}")).unwrap();
        for bad in [
            "shots = 0",
            "shots = many",
            "beta = -1",
            "theta0 = 4",
            "step = 0",
            "occupation = fermi",
            "seed = x",
        ] {
            let e = RunConfig::from_overrides(&mk(bad)).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{bad}");
        }
        let e = RunConfig::from_overrides(&Overrides::parse("experiment = figS3-second-moment\nshots = 10").unwrap());
        assert!(e.is_err());
    }

    #[test]
    fn missing_experiment() {
        assert!(RunConfig::from_overrides(&Overrides::default()).is_err());
        assert!(RunConfig::from_overrides(&Overrides::parse("experiment = nope").unwrap()).is_err());
    }
}
