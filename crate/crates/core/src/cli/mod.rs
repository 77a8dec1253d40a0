//! Configuration-driven experiments behind the `lfgate` binary.
//!
//! Every command writes its outputs plus a [`RunManifest`] into the output
//! directory. Exit codes: 0 success, 2 configuration error, 3 estimation
//! failure, 1 anything else.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::Outcome;
pub use config::ExperimentConfig;
pub use manifest::{RunManifest, RUN_MANIFEST};

use crate::estimate::Method;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Parity,
    Linear,
    Both,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Parity => vec![Method::Parity],
            MethodArg::Linear => vec![Method::Linear],
            MethodArg::Both => Method::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lfgate", version, about = "Simulate the laser-free entangling gate and estimate Bell-state fidelities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Root seed, overriding the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// What to print on stdout.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the gate from |↓↓⟩ and report Bell-state fidelity and error budget.
    SimulateGate {
        /// Follow the gate with the addressing echo and report the singlet fidelity.
        #[arg(long)]
        addressing: bool,
    },
    /// Scan one configuration value (gate infidelity) or run the IDD coherence scan.
    Scan {
        /// Dotted path of the scanned value, e.g. noise.qubit_offset_khz.
        #[arg(long)]
        parameter: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        start: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        stop: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Spin-echo coherence with IDD off and on instead of a gate scan.
        #[arg(long)]
        coherence: bool,
    },
    /// Draw a dataset bundle with the experiment's shape from a known state.
    Synthesize {
        /// True fidelity of a synthetic state, overriding the configured source.
        #[arg(long)]
        fidelity: Option<f64>,
        /// Use the simulated gate output as the true state.
        #[arg(long, conflicts_with = "fidelity")]
        simulated: bool,
        /// JSON file with `re` and `im` arrays (4×4 or 9×9).
        #[arg(long, conflicts_with_all = ["fidelity", "simulated"])]
        density_matrix: Option<PathBuf>,
        #[arg(long, value_enum)]
        target: Option<TargetArg>,
    },
    /// Bootstrapped fidelity estimates of a dataset bundle.
    Estimate {
        /// Bundle directories; several only with --trigger.
        #[arg(long, required = true, num_args = 1..)]
        bundle: Vec<PathBuf>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Select the bundle with the highest trigger fidelity and report its analysis half.
        #[arg(long)]
        trigger: bool,
        #[arg(long)]
        n_boot: Option<usize>,
    },
    /// Mean estimator bias on synthetic data of known fidelity.
    BiasScan {
        #[arg(long, value_delimiter = ',')]
        fidelities: Option<Vec<f64>>,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Per-source infidelity of the gate under the configured noise.
    ErrorBudget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Symmetric,
    Antisymmetric,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SimulateGate { .. } => "simulate-gate",
            Command::Scan { .. } => "scan",
            Command::Synthesize { .. } => "synthesize",
            Command::Estimate { .. } => "estimate",
            Command::BiasScan { .. } => "bias-scan",
            Command::ErrorBudget => "error-budget",
        }
    }
}

/// The effective configuration: file (or defaults), then flag overrides.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    if cfg.output_dir.as_os_str().is_empty() {
        cfg.output_dir = PathBuf::from("out");
    }
    match &cli.command {
        Command::SimulateGate { addressing } => cfg.schedule.addressing |= addressing,
        Command::Scan { parameter, start, stop, points, coherence } => {
            if let Some(p) = parameter {
                cfg.scan.parameter = p.clone();
            }
            if let Some(v) = start {
                cfg.scan.start = *v;
            }
            if let Some(v) = stop {
                cfg.scan.stop = *v;
            }
            if let Some(v) = points {
                cfg.scan.points = *v;
            }
            if *coherence {
                cfg.scan.kind = config::ScanKind::Coherence;
            }
        }
        Command::Synthesize { fidelity, simulated, density_matrix, target } => {
            if let Some(f) = fidelity {
                cfg.dataset.true_state = config::TrueState::Fidelity { fidelity: *f };
            }
            if *simulated {
                cfg.dataset.true_state = config::TrueState::Simulated;
            }
            if let Some(p) = density_matrix {
                cfg.dataset.true_state = config::TrueState::DensityMatrix { path: p.clone() };
            }
            if let Some(t) = target {
                cfg.dataset.target = match t {
                    TargetArg::Symmetric => crate::estimate::TargetState::Symmetric,
                    TargetArg::Antisymmetric => crate::estimate::TargetState::Antisymmetric,
                };
            }
        }
        Command::Estimate { method, n_boot, .. } => {
            if let Some(m) = method {
                cfg.estimate.methods = m.methods();
            }
            if let Some(n) = n_boot {
                cfg.estimate.n_boot = *n;
            }
        }
        Command::BiasScan { fidelities, replicates, method } => {
            if let Some(f) = fidelities {
                cfg.bias.fidelities = f.clone();
            }
            if let Some(r) = replicates {
                cfg.bias.replicates = *r;
            }
            if let Some(m) = method {
                cfg.estimate.methods = m.methods();
            }
        }
        Command::ErrorBudget => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: &Cli, cfg: &ExperimentConfig) -> Result<Outcome> {
    let out = &cfg.output_dir;
    match &cli.command {
        Command::SimulateGate { .. } => commands::simulate_gate(cfg, out),
        Command::Scan { .. } => commands::scan(cfg, out),
        Command::Synthesize { .. } => commands::synthesize(cfg, out),
        Command::Estimate { bundle, trigger, .. } => commands::estimate(cfg, bundle, *trigger, out),
        Command::BiasScan { .. } => commands::bias_scan(cfg, out),
        Command::ErrorBudget => commands::error_budget(cfg, out),
    }
}

/// Runs a parsed command line: resolves the configuration, executes the
/// command on a pool of `--threads` workers and writes the run manifest.
pub fn execute(cli: &Cli) -> Result<(Outcome, RunManifest)> {
    let cfg = resolve_config(cli)?;
    let outcome = match cli.threads {
        Some(0) => return Err(Error::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| dispatch(cli, &cfg))?,
        None => dispatch(cli, &cfg)?,
    };
    let mut files = outcome.files.clone();
    files.push("config.json".into());
    // The saved copy describes the experiment, not where it was written.
    let recorded = ExperimentConfig { output_dir: PathBuf::new(), ..cfg.clone() };
    recorded.save(&cfg.output_dir.join("config.json"))?;
    let manifest = RunManifest::build(cli.command.name(), cfg.hash()?, outcome.seeds.clone(), &cfg.output_dir, &files)?;
    manifest.write(&cfg.output_dir)?;
    Ok((outcome, manifest))
}

/// Entry point of the binary; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok((outcome, _)) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&outcome.summary).unwrap_or_default()),
                Format::Csv => print!("{}", outcome.csv),
            }
            match outcome.failure {
                Some(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
