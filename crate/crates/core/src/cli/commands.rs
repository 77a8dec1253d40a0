//! The experiments behind each subcommand. Every command writes its files
//! into the output directory and returns their names with a summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ScanKind, TrueState};
use super::svg::{LinePlot, Series};
use crate::detect::{pool, reference_pmfs, ReferenceModel};
use crate::dynamics::{bell_infidelity, error_budget_with, BudgetEntry, EffectiveParams, NoiseSpec};
use crate::estimate::bootstrap::BootstrapConfig;
use crate::estimate::dataset::BUNDLE_MANIFEST;
use crate::estimate::pipeline::calibrate;
use crate::estimate::{
    bias_harness, bootstrap, ml_populations_with, read_bundle, synthesize_dataset, synthesize_reference_data, synthetic_state,
    trigger_select, trigger_split, write_bundle, BiasConfig, BiasPoint, Dataset, FidelityEstimate, ReferenceData, TargetState,
    TriggerSelection,
};
use crate::hilbert::{
    basis_ket, c, check_density, embed_qubit_pair, fidelity_raw, ion_qubit_projector, leaky_initial_state, phi_bell, psi_minus_bell,
    spin_op, CMat, Level, SPIN_DIM,
};
use crate::rng::derive;
use crate::sequence::addressing::{build_addressing_schedule, calibrate_addressing_phase};
use crate::sequence::idd_echo::{coherence_scan, fit_coherence_time, log_grid, CoherenceFit};
use crate::sequence::{build_entangling_schedule_with, run_spin, GateSchedule};
use crate::{Error, Result, TWO_PI};

/// Sub-seeds of the root seed, one per stage.
mod stage {
    pub const EXECUTION: u64 = 0;
    pub const IDD: u64 = 1;
    pub const DATASET: u64 = 2;
    pub const REFERENCE: u64 = 3;
    pub const BOOTSTRAP: u64 = 4;
    pub const TRIGGER: u64 = 5;
    pub const BIAS: u64 = 6;
}

fn seed_map(root: u64, stages: &[(&str, u64)]) -> BTreeMap<String, u64> {
    let mut m = BTreeMap::from([("root".to_string(), root)]);
    for &(name, k) in stages {
        m.insert(name.to_string(), derive(root, k));
    }
    m
}

/// Files written by a command plus what it prints.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<String>,
    pub seeds: BTreeMap<String, u64>,
    pub summary: serde_json::Value,
    /// The command's main table.
    pub csv: String,
    /// Failure to report after the outputs have been written.
    pub failure: Option<Error>,
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Writer { dir, files: Vec::new() })
    }

    fn text(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), contents)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.text(name, &(serde_json::to_string_pretty(value)? + "\n"))
    }
}

/// Real and imaginary parts of a density matrix, as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMat) -> Self {
        let rows = |f: fn(&crate::hilbert::C64) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
        MatrixFile { re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    /// A validated two-ion density matrix; 4×4 input is taken on the qubit levels.
    pub fn to_density(&self) -> Result<CMat> {
        let n = self.re.len();
        if self.im.len() != n || self.re.iter().chain(&self.im).any(|r| r.len() != n) {
            return Err(Error::Config("density matrix must be square with matching re and im parts".into()));
        }
        let m = CMat::from_fn(n, n, |i, j| c(self.re[i][j], self.im[i][j]));
        let m = match n {
            4 => embed_qubit_pair(&m),
            SPIN_DIM => m,
            _ => return Err(Error::Config(format!("density matrix must be 4x4 or 9x9, got {n}x{n}"))),
        };
        check_density(&m, 1e-8, 1e-8).map_err(|e| Error::Config(format!("density matrix: {e}")))?;
        Ok(m)
    }
}

fn gate_schedule(cfg: &ExperimentConfig, p: &EffectiveParams) -> Result<GateSchedule> {
    build_entangling_schedule_with(p, &cfg.envelope(), &cfg.entangling_options())
}

fn noise_active(n: &NoiseSpec) -> bool {
    n.has_dissipation() || n.has_frequency_noise() || n.qubit_detuning != 0.0 || n.initial_nbar > 0.0
}

/// Runs the addressing echo on `rho`; returns the new state and the pulse phase used.
fn address(cfg: &ExperimentConfig, p: &EffectiveParams, rho: &CMat, seed: u64) -> Result<(CMat, f64)> {
    let diff = TWO_PI * cfg.schedule.ac_zeeman_differential_khz * 1e3;
    let (phase, _) = calibrate_addressing_phase(diff)?;
    let schedule = build_addressing_schedule(diff, phase)?;
    // Only the qubit-frequency offset acts during the echo: the mode is not driven.
    let noise = NoiseSpec { qubit_detuning: cfg.noise_spec().qubit_detuning, ..Default::default() };
    Ok((run_spin(&schedule, p, &noise, rho, &cfg.exec_options(seed))?, phase))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateReport {
    pub gate_duration_us: f64,
    pub bell_fidelity: f64,
    pub bell_infidelity: f64,
    pub singlet_fidelity: Option<f64>,
    pub addressing_phase_rad: Option<f64>,
    pub error_budget: Option<Vec<BudgetEntry>>,
    pub error_budget_sum: Option<f64>,
}

pub fn simulate_gate(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let p = cfg.effective_params()?;
    let noise = cfg.noise_spec();
    let schedule = gate_schedule(cfg, &p)?;
    let seed = derive(cfg.seed, stage::EXECUTION);
    let opts = cfg.exec_options(seed);
    let dd = basis_ket(Level::Down, Level::Down);
    let mut rho = run_spin(&schedule, &p, &noise, &(&dd * dd.adjoint()), &opts)?;
    let bell = fidelity_raw(&rho, &phi_bell());
    let mut report = GateReport {
        gate_duration_us: schedule.total_duration() * 1e6,
        bell_fidelity: bell,
        bell_infidelity: 1.0 - bell,
        singlet_fidelity: None,
        addressing_phase_rad: None,
        error_budget: None,
        error_budget_sum: None,
    };
    if cfg.schedule.addressing {
        let (after, phase) = address(cfg, &p, &rho, seed)?;
        report.singlet_fidelity = Some(fidelity_raw(&after, &psi_minus_bell()));
        report.addressing_phase_rad = Some(phase);
        rho = after;
    }
    if noise_active(&noise) {
        let b = error_budget_with(&p, &noise, &schedule, &opts)?;
        report.error_budget_sum = Some(b.total);
        report.error_budget = Some(b.entries);
    }
    let mut csv = String::from("quantity,value\n");
    let _ = writeln!(csv, "gate_duration_us,{}", report.gate_duration_us);
    let _ = writeln!(csv, "bell_fidelity,{}", report.bell_fidelity);
    let _ = writeln!(csv, "bell_infidelity,{}", report.bell_infidelity);
    if let Some(f) = report.singlet_fidelity {
        let _ = writeln!(csv, "singlet_fidelity,{f}");
    }
    for e in report.error_budget.iter().flatten() {
        let _ = writeln!(csv, "budget_{},{}", e.source, e.infidelity);
    }
    let mut w = Writer::new(out)?;
    w.json("gate_report.json", &report)?;
    w.text("gate_report.csv", &csv)?;
    w.json("final_state.json", &MatrixFile::from_matrix(&rho))?;
    Ok(Outcome {
        files: w.files,
        seeds: seed_map(cfg.seed, &[("execution", stage::EXECUTION)]),
        summary: serde_json::to_value(&report)?,
        csv,
        failure: None,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BudgetReport {
    pub entries: Vec<BudgetEntry>,
    pub sum: f64,
    /// All sources acting together.
    pub combined: f64,
}

pub fn error_budget(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let p = cfg.effective_params()?;
    let noise = cfg.noise_spec();
    let schedule = gate_schedule(cfg, &p)?;
    let opts = cfg.exec_options(derive(cfg.seed, stage::EXECUTION));
    let b = error_budget_with(&p, &noise, &schedule, &opts)?;
    let combined = bell_infidelity(&p, &noise, &schedule, &opts)?;
    let report = BudgetReport { entries: b.entries, sum: b.total, combined };
    let mut csv = String::from("source,infidelity\n");
    for e in &report.entries {
        let _ = writeln!(csv, "{},{}", e.source, e.infidelity);
    }
    let _ = writeln!(csv, "sum,{}", report.sum);
    let _ = writeln!(csv, "combined,{}", report.combined);
    let mut w = Writer::new(out)?;
    w.json("error_budget.json", &report)?;
    w.text("error_budget.csv", &csv)?;
    Ok(Outcome {
        files: w.files,
        seeds: seed_map(cfg.seed, &[("execution", stage::EXECUTION)]),
        summary: serde_json::to_value(&report)?,
        csv,
        failure: None,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateScanReport {
    pub parameter: String,
    pub values: Vec<f64>,
    pub infidelities: Vec<f64>,
    pub max_infidelity: f64,
    /// Grid value with the lowest infidelity.
    pub argmin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoherenceScanReport {
    pub off: CoherenceFit,
    pub on: CoherenceFit,
    pub off_coherence_time_us: f64,
    pub on_coherence_time_us: f64,
    pub ratio: f64,
}

pub fn scan(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    match cfg.scan.kind {
        ScanKind::Gate => gate_scan(cfg, out),
        ScanKind::Coherence => coherence(cfg, out),
    }
}

fn gate_scan(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let path = &cfg.scan.parameter;
    let values = cfg.scan.grid();
    let configs: Vec<ExperimentConfig> = values.iter().map(|&v| cfg.with_value(path, v)).collect::<Result<_>>()?;
    let seed = derive(cfg.seed, stage::EXECUTION);
    let infidelities: Vec<f64> = configs
        .par_iter()
        .map(|c| {
            let p = c.effective_params()?;
            bell_infidelity(&p, &c.noise_spec(), &gate_schedule(c, &p)?, &c.exec_options(seed))
        })
        .collect::<Result<_>>()?;
    let (imin, _) = infidelities.iter().enumerate().fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
    let report = GateScanReport {
        parameter: path.clone(),
        max_infidelity: infidelities.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        argmin: values[imin],
        values: values.clone(),
        infidelities: infidelities.clone(),
    };
    let mut csv = format!("{path},bell_infidelity\n");
    for (v, f) in values.iter().zip(&infidelities) {
        let _ = writeln!(csv, "{v},{f}");
    }
    let plot = LinePlot {
        title: format!("Bell-state infidelity vs {path}"),
        x_label: path.clone(),
        y_label: "1 - F".into(),
        log_x: false,
        log_y: cfg.scan.log_y,
        // Rounding can push a perfect gate slightly below zero; keep it on a log axis.
        series: vec![Series {
            label: "infidelity".into(),
            points: values.iter().zip(&infidelities).map(|(&v, &f)| (v, if cfg.scan.log_y { f.max(1e-16) } else { f })).collect(),
        }],
    };
    let mut w = Writer::new(out)?;
    w.json("scan.json", &report)?;
    w.text("scan.csv", &csv)?;
    w.text("scan.svg", &plot.to_svg())?;
    Ok(Outcome {
        files: w.files,
        seeds: seed_map(cfg.seed, &[("execution", stage::EXECUTION)]),
        summary: serde_json::to_value(&report)?,
        csv,
        failure: None,
    })
}

fn coherence(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let idd = &cfg.idd;
    let echo = idd.echo_config(derive(cfg.seed, stage::IDD));
    let mut csv = String::from("idd,duration_us,contrast\n");
    let mut series = Vec::new();
    let mut fits = Vec::new();
    for (on, range) in [(false, idd.off_durations_us), (true, idd.on_durations_us)] {
        let durations = log_grid(range[0] * 1e-6, range[1] * 1e-6, idd.points);
        let contrast = coherence_scan(&echo, &durations, on)?;
        for (d, c) in durations.iter().zip(&contrast) {
            let _ = writeln!(csv, "{},{},{}", if on { "on" } else { "off" }, d * 1e6, c);
        }
        fits.push(fit_coherence_time(&durations, &contrast)?);
        series.push(Series {
            label: if on { "IDD on".into() } else { "IDD off".into() },
            points: durations.iter().map(|d| d * 1e6).zip(contrast.iter().cloned()).collect(),
        });
    }
    let report = CoherenceScanReport {
        off: fits[0],
        on: fits[1],
        off_coherence_time_us: fits[0].coherence_time * 1e6,
        on_coherence_time_us: fits[1].coherence_time * 1e6,
        ratio: fits[1].coherence_time / fits[0].coherence_time,
    };
    let plot = LinePlot {
        title: "Spin-echo contrast".into(),
        x_label: "echo duration (us)".into(),
        y_label: "contrast".into(),
        log_x: true,
        log_y: false,
        series,
    };
    let mut w = Writer::new(out)?;
    w.json("coherence.json", &report)?;
    w.text("coherence.csv", &csv)?;
    w.text("coherence.svg", &plot.to_svg())?;
    Ok(Outcome {
        files: w.files,
        seeds: seed_map(cfg.seed, &[("idd", stage::IDD)]),
        summary: serde_json::to_value(&report)?,
        csv,
        failure: None,
    })
}

/// The state the synthetic data are drawn from.
pub fn true_state(cfg: &ExperimentConfig) -> Result<CMat> {
    let target = cfg.dataset.target;
    let eps = cfg.detection.leak_prob;
    match &cfg.dataset.true_state {
        TrueState::Fidelity { fidelity } => synthetic_state(target, *fidelity, eps),
        TrueState::Simulated => {
            let p = cfg.effective_params()?;
            let seed = derive(cfg.seed, stage::EXECUTION);
            let schedule = gate_schedule(cfg, &p)?;
            let rho = run_spin(&schedule, &p, &cfg.noise_spec(), &leaky_initial_state(eps), &cfg.exec_options(seed))?;
            match target {
                TargetState::Symmetric => Ok(rho),
                TargetState::Antisymmetric => Ok(address(cfg, &p, &rho, seed)?.0),
            }
        }
        TrueState::DensityMatrix { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let m: MatrixFile = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            m.to_density()
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub target: TargetState,
    pub dataset_id: u64,
    /// Overlap of the generated state with the target, leaked population included.
    pub true_fidelity: f64,
    /// Overlap conditioned on both ions being in the qubit subspace; the
    /// quantity the leakage-corrected estimators report.
    pub leakage_corrected_fidelity: f64,
    pub leak_prob: f64,
    pub population_sets: usize,
    pub parity_sets: usize,
    pub trials_per_set: u64,
    pub reference_sets: usize,
    pub reference_trials: u64,
}

fn qubit_population(rho: &CMat) -> f64 {
    let q = ion_qubit_projector();
    (spin_op(&q, &q) * rho).trace().re
}

pub fn synthesize(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let d = &cfg.dataset;
    let model = cfg.reference_model();
    let pmfs = reference_pmfs(&model);
    let rho = true_state(cfg)?;
    let shape = d.shape();
    shape.validate()?;
    let dataset = synthesize_dataset(&rho, &pmfs, d.target, &shape, d.dataset_id, derive(cfg.seed, stage::DATASET));
    let reference = synthesize_reference_data(&model, &pmfs, d.reference_sets, d.reference_trials, derive(cfg.seed, stage::REFERENCE));
    let mut w = Writer::new(out)?;
    for path in write_bundle(out, &dataset, &reference)? {
        w.files.push(path.file_name().expect("bundle file").to_string_lossy().into_owned());
    }
    let true_fidelity = fidelity_raw(&rho, &d.target.ket());
    let report = SynthesisReport {
        target: d.target,
        dataset_id: d.dataset_id,
        true_fidelity,
        leakage_corrected_fidelity: true_fidelity / qubit_population(&rho),
        leak_prob: model.leak_prob,
        population_sets: dataset.population.len(),
        parity_sets: dataset.parity.len(),
        trials_per_set: d.trials_per_set,
        reference_sets: d.reference_sets,
        reference_trials: d.reference_trials,
    };
    w.json("truth.json", &report)?;
    w.json("true_state.json", &MatrixFile::from_matrix(&rho))?;
    let csv = format!(
        "target,dataset_id,true_fidelity,leakage_corrected_fidelity,leak_prob\n{},{},{},{},{}\n",
        d.target.name(),
        d.dataset_id,
        report.true_fidelity,
        report.leakage_corrected_fidelity,
        report.leak_prob
    );
    Ok(Outcome {
        files: w.files,
        seeds: seed_map(cfg.seed, &[("dataset", stage::DATASET), ("reference", stage::REFERENCE), ("execution", stage::EXECUTION)]),
        summary: serde_json::to_value(&report)?,
        csv,
        failure: None,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateReport {
    pub target: TargetState,
    pub dataset_id: u64,
    pub population_trials: u64,
    pub parity_sets: usize,
    pub calibration: ReferenceModel,
    pub calibration_sigma: ReferenceModel,
    /// ML populations of zero, one and two bright ions.
    pub populations: [f64; 3],
    pub estimates: Vec<FidelityEstimate>,
    /// Methods that could not be applied, with the reason.
    pub errors: BTreeMap<String, String>,
    pub trigger: Option<TriggerSelection>,
}

fn estimate_csv(r: &EstimateReport) -> String {
    let mut csv = String::from("method,original,ci68_low,ci68_high,mean,median,untruncated,n_boot,n_failed\n");
    for e in &r.estimates {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            e.method.name(),
            e.point,
            e.ci68.0,
            e.ci68.1,
            e.mean,
            e.median,
            e.untruncated,
            e.n_boot,
            e.n_failed
        );
    }
    for (m, err) in &r.errors {
        let _ = writeln!(csv, "{m},,,,,,,,\"{}\"", err.replace('"', "'"));
    }
    csv
}

fn populations_of(dataset: &Dataset, reference: &ReferenceData) -> Result<(crate::detect::Calibration, [f64; 3])> {
    let cal = calibrate(reference, None)?;
    if dataset.population.is_empty() {
        return Err(Error::EstimationFailed("dataset has no population data".into()));
    }
    let hist = pool(&dataset.population)?;
    let pmfs = crate::detect::reference_pmfs_with_bins(&cal.model, hist.n_bins());
    let p = ml_populations_with(&hist, &pmfs)?;
    Ok((cal, [p.p0, p.p1, p.p2]))
}

fn load_bundle(dir: &Path) -> Result<(Dataset, ReferenceData)> {
    if !dir.join(BUNDLE_MANIFEST).is_file() {
        return Err(Error::Config(format!("{} is not a dataset bundle", dir.display())));
    }
    read_bundle(dir)
}

/// Bootstrapped estimates of one bundle, or with `trigger` the analysis
/// half of the bundle with the highest trigger fidelity.
pub fn estimate(cfg: &ExperimentConfig, bundles: &[PathBuf], trigger: bool, out: &Path) -> Result<Outcome> {
    if bundles.is_empty() || (!trigger && bundles.len() != 1) {
        return Err(Error::Config("estimate takes one bundle, or several with --trigger".into()));
    }
    let loaded: Vec<(Dataset, ReferenceData)> = bundles.iter().map(|b| load_bundle(b)).collect::<Result<_>>()?;
    let methods = &cfg.estimate.methods;
    let split_seed = derive(cfg.seed, stage::TRIGGER);
    let (selection, dataset, reference) = if trigger {
        let (ds, refs): (Vec<Dataset>, Vec<ReferenceData>) = loaded.into_iter().unzip();
        let sel = trigger_select(&ds, &refs, methods[0], split_seed)?;
        let half = trigger_split(&ds[sel.selected], split_seed).1;
        (Some(sel.clone()), half, refs[sel.selected].clone())
    } else {
        let (d, r) = loaded.into_iter().next().expect("one bundle");
        (None, d, r)
    };
    let (cal, populations) = populations_of(&dataset, &reference)?;
    let mut report = EstimateReport {
        target: dataset.target,
        dataset_id: dataset.id,
        population_trials: dataset.population_trials(),
        parity_sets: dataset.parity.len(),
        calibration: cal.model,
        calibration_sigma: cal.sigma,
        populations,
        estimates: Vec::new(),
        errors: BTreeMap::new(),
        trigger: selection,
    };
    let mut failure = None;
    if dataset.parity.is_empty() {
        for m in methods {
            report.errors.insert(m.name().to_string(), "no parity data; populations only".into());
        }
    } else {
        let bc = BootstrapConfig {
            n_boot: cfg.estimate.n_boot,
            seed: derive(cfg.seed, stage::BOOTSTRAP),
            lambda_jitter: cfg.estimate.lambda_jitter,
        };
        match bootstrap(&dataset, &reference, methods, &bc) {
            Ok((_, est)) => report.estimates = est,
            Err(e) => {
                for m in methods {
                    report.errors.insert(m.name().to_string(), e.to_string());
                }
                failure = Some(e);
            }
        }
    }
    let csv = estimate_csv(&report);
    let mut w = Writer::new(out)?;
    w.json("estimate.json", &report)?;
    w.text("estimate.csv", &csv)?;
    let mut stages = vec![("bootstrap", stage::BOOTSTRAP)];
    if trigger {
        stages.push(("trigger", stage::TRIGGER));
    }
    Ok(Outcome { files: w.files, seeds: seed_map(cfg.seed, &stages), summary: serde_json::to_value(&report)?, csv, failure })
}

pub fn bias_scan(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let bc = BiasConfig {
        target: cfg.dataset.target,
        shape: cfg.dataset.shape(),
        model: cfg.reference_model(),
        n_replicates: cfg.bias.replicates,
        seed: derive(cfg.seed, stage::BIAS),
    };
    let points: Vec<BiasPoint> = bias_harness(&cfg.bias.fidelities, &cfg.estimate.methods, &bc)?;
    let mut csv = String::from("true_fidelity,method,mean_bias,std_error,n_replicates,n_failed\n");
    for p in &points {
        let _ = writeln!(csv, "{},{},{},{},{},{}", p.true_fidelity, p.method.name(), p.mean_bias, p.std_error, p.n_replicates, p.n_failed);
    }
    let series = cfg
        .estimate
        .methods
        .iter()
        .map(|m| Series {
            label: m.name().into(),
            points: points.iter().filter(|p| p.method == *m).map(|p| (p.true_fidelity, p.mean_bias)).collect(),
        })
        .collect();
    let plot = LinePlot {
        title: "Estimator bias".into(),
        x_label: "true fidelity".into(),
        y_label: "mean bias".into(),
        log_x: false,
        log_y: false,
        series,
    };
    let mut w = Writer::new(out)?;
    w.json("bias.json", &points)?;
    w.text("bias.csv", &csv)?;
    w.text("bias.svg", &plot.to_svg())?;
    Ok(Outcome {
        files: w.files,
        seeds: seed_map(cfg.seed, &[("bias", stage::BIAS)]),
        summary: serde_json::to_value(&points)?,
        csv,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_file_round_trip_and_embedding() {
        let rho = synthetic_state(TargetState::Symmetric, 0.9, 1e-3).unwrap();
        let back = MatrixFile::from_matrix(&rho).to_density().unwrap();
        assert!((back - &rho).norm() < 1e-15);
        let mut q = MatrixFile { re: vec![vec![0.0; 4]; 4], im: vec![vec![0.0; 4]; 4] };
        q.re[0][0] = 1.0;
        let m = q.to_density().unwrap();
        assert_eq!(m.nrows(), SPIN_DIM);
        assert!((m.trace().re - 1.0).abs() < 1e-15);
        q.re[0][0] = 2.0;
        assert!(q.to_density().is_err());
    }
}
