//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::path::Path;
use std::time::{Duration, Instant};

use clap::Parser;
use lfgate::cli::{self, Cli, ExperimentConfig, RUN_MANIFEST};
use lfgate::detect::{reference_pmfs, ReferenceModel};
use lfgate::dynamics::{
    bell_infidelity, error_budget_with, force_hamiltonian, propagate_analytic, propagate_numeric, EffectiveParams, NoiseSpec,
};
use lfgate::estimate::bias::{bias_harness, BiasConfig};
use lfgate::estimate::{
    analyze, bootstrap, correct_leakage, leakage_forward, synthesize_dataset, synthesize_reference_data, synthetic_state, trigger_select,
    trigger_split, BootstrapConfig, DatasetShape, Method, TargetState,
};
use lfgate::hilbert::{basis_ket, fidelity_raw, global_rotation, phi_bell, state_fidelity, CVec, HilbertSpec, Level, QuantumState};
use lfgate::sequence::idd_echo::{coherence_scan, fit_coherence_time, log_grid, IddEchoConfig};
use lfgate::sequence::{build_entangling_schedule, run_spin, EnvelopeSpec, ExecOptions};
use lfgate::{Result, TWO_PI};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    (x - target).abs() <= rel * target
}

fn within_factor(x: f64, target: f64, factor: f64) -> bool {
    x >= target / factor && x <= target * factor
}

fn ideal_gate() -> Result<Verdict> {
    let p = EffectiveParams::operating_default();
    let schedule = build_entangling_schedule(&p, &EnvelopeSpec::default())?;
    let dd = basis_ket(Level::Down, Level::Down);
    let rho = run_spin(&schedule, &p, &NoiseSpec::none(), &(&dd * dd.adjoint()), &ExecOptions::default())?;
    let infidelity = 1.0 - fidelity_raw(&rho, &phi_bell());

    let spec = HilbertSpec::new(HilbertSpec::DEFAULT_FOCK_DIM)?;
    let t = 8.0 * p.loop_time();
    let spin = global_rotation(std::f64::consts::FRAC_PI_2, 0.0) * dd;
    let mut motion = CVec::zeros(spec.fock_dim);
    motion[0] = lfgate::hilbert::cr(1.0);
    let init = QuantumState::Ket(spin.kronecker(&motion));
    let exact = propagate_analytic(&p, t, &init)?;
    let numeric = propagate_numeric(force_hamiltonian(p.coupling_strength(), p.big_delta, &spec), &init, 0.0, t, 0.02 / p.big_delta)?;
    let deviation = (1.0 - state_fidelity(&numeric, &exact)?).abs();
    verdict(
        infidelity.abs() <= 1e-8 && deviation < 1e-8,
        format!("schedule infidelity {infidelity:.1e}, analytic vs numeric {deviation:.1e}"),
    )
}

fn error_budget() -> Result<Verdict> {
    let p = EffectiveParams::operating_default();
    let schedule = build_entangling_schedule(&p, &EnvelopeSpec::default())?;
    let noise = NoiseSpec::experimental();
    let opts = ExecOptions::default();
    let b = error_budget_with(&p, &noise, &schedule, &opts)?;
    let get = |s: &str| b.get(s).unwrap_or(f64::NAN);
    let (deph, heat, drift) = (get("motional_dephasing"), get("heating"), get("motional_frequency_residual"));
    let combined = bell_infidelity(&p, &noise, &schedule, &opts)?;
    verdict(
        within(deph, 5.8e-4, 0.25) && within_factor(heat, 3e-5, 2.0) && within_factor(drift, 3e-5, 2.0) && within(combined, 7e-4, 0.30),
        format!("dephasing {deph:.2e}, heating {heat:.2e}, drift {drift:.2e} ({} samples), combined {combined:.2e}", opts.drift_samples),
    )
}

fn robustness_scan() -> Result<Verdict> {
    let p = EffectiveParams::operating_default();
    let schedule = build_entangling_schedule(&p, &EnvelopeSpec::default())?;
    let mut worst: f64 = 0.0;
    for k in 0..21 {
        let offset_khz = -200.0 + 20.0 * k as f64;
        let noise = NoiseSpec::qubit_offset(TWO_PI * offset_khz * 1e3);
        worst = worst.max(bell_infidelity(&p, &noise, &schedule, &ExecOptions::default())?);
    }
    verdict(worst < 1e-2, format!("max infidelity over 21 offsets in [-200, 200] kHz: {worst:.1e}"))
}

fn idd_coherence() -> Result<Verdict> {
    let cfg = IddEchoConfig::default();
    let mut times = Vec::new();
    for (on, start, stop) in [(false, 20e-6, 5e-3), (true, 200e-6, 40e-3)] {
        let durations = log_grid(start, stop, 16);
        times.push(fit_coherence_time(&durations, &coherence_scan(&cfg, &durations, on)?)?.coherence_time);
    }
    let ratio = times[1] / times[0];
    verdict(ratio >= 10.0, format!("T2 off {:.0} us, on {:.0} us, ratio {ratio:.1}", times[0] * 1e6, times[1] * 1e6))
}

fn estimator_correctness() -> Result<Verdict> {
    let cfg = BiasConfig::standard(TargetState::Symmetric);
    let points = bias_harness(&[0.5, 0.99, 0.999], &Method::ALL, &cfg)?;
    let find = |f: f64, m: Method| points.iter().find(|p| p.true_fidelity == f && p.method == m).expect("bias point");
    let unbiased = [0.5, 0.99, 0.999].iter().all(|&f| {
        let p = find(f, Method::Linear);
        p.mean_bias.abs() <= 3.0 * p.std_error
    });
    let (par99, par999, lin999) = (find(0.99, Method::Parity), find(0.999, Method::Parity), find(0.999, Method::Linear));
    let parity_shape = par99.mean_bias <= 0.0 && par999.mean_bias <= 0.0 && par999.mean_bias.abs() >= par99.mean_bias.abs();
    let ordering = lin999.mean_bias.abs() <= par999.mean_bias.abs();
    let mut round_trip: f64 = 0.0;
    for target in [TargetState::Symmetric, TargetState::Antisymmetric] {
        for i in 0..=50 {
            for eps in [0.0, 1e-4, 1.7e-3, 3.5e-3, 0.02, 0.1] {
                let f = i as f64 / 50.0;
                round_trip = round_trip.max((correct_leakage(leakage_forward(f, eps, target), eps, target)? - f).abs());
            }
        }
    }
    let lin: Vec<String> = [0.5, 0.99, 0.999]
        .iter()
        .map(|&f| {
            let p = find(f, Method::Linear);
            format!("{:+.1e}±{:.1e}", p.mean_bias, p.std_error)
        })
        .collect();
    verdict(
        unbiased && parity_shape && ordering && round_trip <= 1e-12,
        format!(
            "linear bias at 0.5/0.99/0.999: {}; parity {:+.1e} at 0.99, {:+.1e} at 0.999; leakage round trip {round_trip:.0e}",
            lin.join(", "),
            par99.mean_bias,
            par999.mean_bias
        ),
    )
}

fn pipeline_closure() -> Result<Verdict> {
    let truth = 0.9977;
    let model = ReferenceModel::default().with_leak(1.7e-3);
    let pmfs = reference_pmfs(&model);
    let mut pass = true;
    let mut parts = Vec::new();
    for target in [TargetState::Symmetric, TargetState::Antisymmetric] {
        let rho = synthetic_state(target, truth, model.leak_prob)?;
        let dataset = synthesize_dataset(&rho, &pmfs, target, &DatasetShape::standard(target), 1, 2);
        let reference = synthesize_reference_data(&model, &pmfs, 1, 18_500, 102);
        let (_, estimates) =
            bootstrap(&dataset, &reference, &Method::ALL, &BootstrapConfig { n_boot: 5000, seed: 1, lambda_jitter: 0.01 })?;
        for e in estimates {
            let covered = e.ci68.0 <= truth && truth <= e.ci68.1;
            let width = e.ci68.1 - e.ci68.0;
            pass &= covered && e.n_failed == 0;
            if target == TargetState::Antisymmetric {
                pass &= within(width, 0.0024, 0.40);
            }
            parts.push(format!("{} {} {:.4} [{:.4}, {:.4}] w {:.4}", target.name(), e.method.name(), e.point, e.ci68.0, e.ci68.1, width));
        }
    }
    verdict(pass, parts.join("; "))
}

fn trigger_soundness() -> Result<Verdict> {
    let rounds = 50;
    let per_round = 20;
    let target = TargetState::Symmetric;
    let model = ReferenceModel::default().with_leak(3.5e-3);
    let pmfs = reference_pmfs(&model);
    let rho = synthetic_state(target, 0.9977, model.leak_prob)?;
    let shape = DatasetShape::standard(target);
    let method = Method::Parity;
    let (mut diffs, mut same_half) = (Vec::new(), Vec::new());
    for r in 0..rounds {
        let ids: Vec<u64> = (0..per_round).map(|k| (r * per_round + k) as u64).collect();
        let datasets: Vec<_> = ids.iter().map(|&id| synthesize_dataset(&rho, &pmfs, target, &shape, id, 7)).collect();
        let references: Vec<_> = ids.iter().map(|&id| synthesize_reference_data(&model, &pmfs, 1, 18_500, 10_000 + id)).collect();
        let sel = trigger_select(&datasets, &references, method, 11)?;
        // Control: the analysis half of a dataset fixed before looking at any data.
        let control = analyze(&trigger_split(&datasets[0], 11).1, &references[0], &[method])?.fidelity(method).expect("requested");
        diffs.push(sel.reported - control);
        same_half.push(sel.trigger_fidelities[sel.selected] - sel.trigger_fidelities[0]);
    }
    let stats = |v: &[f64]| {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        (m, (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt())
    };
    let (bias, se) = stats(&diffs);
    let (naive, naive_se) = stats(&same_half);
    verdict(
        bias <= 3.0 * se,
        format!(
            "{rounds} rounds of {per_round}: analysis-half selection bias {bias:+.1e} ± {se:.1e}; reusing the trigger half would give {naive:+.1e} ± {naive_se:.1e}"
        ),
    )
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>> {
    let cli = Cli::try_parse_from(std::iter::once("lfgate").chain(args.iter().copied())).expect("valid arguments");
    let (outcome, _) = cli::execute(&cli)?;
    if let Some(e) = outcome.failure {
        return Err(e);
    }
    let out = args.iter().position(|a| *a == "--out").map(|i| args[i + 1]).expect("--out given");
    Ok(std::fs::read(Path::new(out).join(RUN_MANIFEST))?)
}

fn determinism() -> Result<Verdict> {
    let tmp = tempfile::tempdir()?;
    let root = tmp.path();
    let mut cfg = ExperimentConfig::default();
    cfg.noise = cli::config::NoiseConfig::experimental();
    cfg.execution.drift_samples = 40;
    cfg.idd.trajectories = 16;
    cfg.idd.points = 8;
    cfg.bias.replicates = 20;
    cfg.bias.fidelities = vec![0.9, 0.99];
    cfg.estimate.n_boot = 200;
    let config_path = root.join("config.json");
    cfg.save(&config_path)?;
    let config = config_path.to_str().expect("utf-8 path").to_string();
    let bundle = root.join("bundle");
    let bundle = bundle.to_str().expect("utf-8 path").to_string();
    run_cli(&["synthesize", "--config", &config, "--target", "antisymmetric", "--out", &bundle])?;
    let commands: Vec<Vec<&str>> = vec![
        vec!["simulate-gate", "--addressing"],
        vec!["error-budget"],
        vec!["scan"],
        vec!["scan", "--coherence"],
        vec!["synthesize"],
        vec!["estimate", "--bundle", &bundle],
        vec!["bias-scan"],
    ];
    let mut mismatched = Vec::new();
    for (k, cmd) in commands.iter().enumerate() {
        let mut manifests = Vec::new();
        for threads in ["1", "4", "8"] {
            let out = root.join(format!("run{k}_{threads}"));
            let out = out.to_str().expect("utf-8 path").to_string();
            let mut args = cmd.clone();
            args.extend(["--config", &config, "--seed", "5", "--threads", threads, "--out", &out]);
            manifests.push(run_cli(&args)?);
        }
        if manifests.windows(2).any(|w| w[0] != w[1]) {
            mismatched.push(cmd.join(" "));
        }
    }
    verdict(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!("{} commands, identical manifests at 1, 4 and 8 threads", commands.len())
        } else {
            format!("manifests differ for: {}", mismatched.join(", "))
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Verdict>, Duration); 8] = [
        ("ideal gate", ideal_gate, Duration::from_secs(30)),
        ("error budget", error_budget, Duration::from_secs(300)),
        ("robustness scan", robustness_scan, Duration::from_secs(300)),
        ("IDD coherence", idd_coherence, Duration::from_secs(120)),
        ("estimator correctness", estimator_correctness, Duration::from_secs(600)),
        ("pipeline closure", pipeline_closure, Duration::from_secs(600)),
        ("trigger selection", trigger_soundness, Duration::from_secs(600)),
        ("determinism", determinism, Duration::MAX),
    ];
    let mut failures = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(v) => (v.pass && elapsed <= *limit, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let timing = if elapsed > *limit {
            format!("{:.1} s, over limit", elapsed.as_secs_f64())
        } else {
            format!("{:.1} s", elapsed.as_secs_f64())
        };
        println!("criterion {} {:<22} {}  {detail} ({timing})", i + 1, name, if pass { "PASS" } else { "FAIL" });
        failures += usize::from(!pass);
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
