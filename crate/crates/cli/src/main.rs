use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fluctua_cli::acceptance::{self, AcceptanceOptions};
use fluctua_cli::config::{Overrides, RunConfig};
use fluctua_cli::{run, CliError};
use fluctua_core::models::Preset;

#[derive(Parser)]
#[command(
    name = "fluctua",
    version,
    about = "Energy-change statistics of EPM, TPM and MLL measurement schemes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset and write results.csv, summary.json and plot.svg.
    Run(RunArgs),
    /// Run the acceptance suite; exit 4 if any criterion fails.
    Check(CheckArgs),
    /// List preset names.
    ListPresets,
}

#[derive(Args)]
struct RunArgs {
    /// Preset name; may instead come from the config file.
    preset: Option<String>,
    /// Flat key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Shot count or "exact".
    #[arg(long)]
    shots: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    theta0: Option<f64>,
    /// bose | as_printed
    #[arg(long)]
    occupation: Option<String>,
    /// full | bare
    #[arg(long)]
    measurement: Option<String>,
    /// RK4 step for three-level presets.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    ensemble_size: Option<usize>,
    /// Also run the acceptance suite; exit 4 on failure.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "bose")]
    occupation: String,
    /// RK4 step used by the three-level criteria.
    #[arg(long, default_value_t = fluctua_core::channels::DEFAULT_STEP)]
    step: f64,
}

impl RunArgs {
    fn overrides(&self) -> Result<Overrides, CliError> {
        let mut o = Overrides::default();
        let mut put = |k: &str, v: Option<String>| v.map_or(Ok(()), |v| o.set(k, v));
        put("experiment", self.preset.clone())?;
        put("output_dir", self.out.as_ref().map(|p| p.display().to_string()))?;
        put("seed", self.seed.map(|v| v.to_string()))?;
        put("shots", self.shots.clone())?;
        put("beta", self.beta.map(|v| v.to_string()))?;
        put("theta0", self.theta0.map(|v| v.to_string()))?;
        put("occupation", self.occupation.clone())?;
        put("measurement", self.measurement.clone())?;
        put("step", self.step.map(|v| v.to_string()))?;
        put("ensemble_size", self.ensemble_size.map(|v| v.to_string()))?;
        put("check", self.check.then(|| "true".to_string()))?;
        Ok(o)
    }
}

fn run_command(args: RunArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(p) => Overrides::from_file(p)?,
        None => Overrides::default(),
    };
    let cfg = RunConfig::from_overrides(&file.merge(args.overrides()?))?;
    let (artifacts, check) = run::run(&cfg)?;
    println!("wrote {}", artifacts.csv.display());
    println!("wrote {}", artifacts.summary.display());
    println!("wrote {}", artifacts.plot.display());
    if let Some(outcomes) = check {
        for o in &outcomes {
            println!("{}", o.line());
        }
        if !acceptance::all_passed(&outcomes) {
            return Err(CliError::CheckFailed("see summary.json".into()));
        }
    }
    Ok(())
}

fn check_command(args: CheckArgs) -> Result<(), CliError> {
    if !(args.step.is_finite() && args.step > 0.0) {
        return Err(CliError::Config(format!("step must be positive, got {}", args.step)));
    }
    let opts = AcceptanceOptions {
        step: args.step,
        occupation: args.occupation.parse()?,
        seed: args.seed,
    };
    let mut failed = Vec::new();
    for c in acceptance::criteria() {
        let o = c.run(&opts);
        println!("{}", o.line());
        if o.status == acceptance::Status::Fail {
            failed.push(o.id.to_string());
        }
    }
    if failed.is_empty() {
        println!("all criteria passed");
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("criteria {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run_command(a),
        Command::Check(a) => check_command(a),
        Command::ListPresets => {
            for p in Preset::ALL {
                println!("{:<26} {}", p.name(), p.description());
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fluctua: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
