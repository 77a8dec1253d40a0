//! Estimator bias on synthetic data of known fidelity.
//!
//! Replicates are drawn from the dephasing state family with the generating
//! reference model and analysed with that same model, so the curve isolates
//! the estimators themselves. Estimates are not truncated here.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{synthesize_dataset, DatasetShape};
use super::linear::{linear_coeffs, linear_correct, linear_raw};
use super::parity::parity_method;
use super::pipeline::Method;
use super::states::{synthetic_state, TargetState};
use crate::detect::{povm_from_pmfs, reference_pmfs, Analysis, ReferenceModel};
use crate::rng::derive_path;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasConfig {
    pub target: TargetState,
    pub shape: DatasetShape,
    /// Generating model; its `leak_prob` is the simulated leakage.
    pub model: ReferenceModel,
    pub n_replicates: usize,
    pub seed: u64,
}

impl BiasConfig {
    pub fn standard(target: TargetState) -> Self {
        let leak = match target {
            TargetState::Symmetric => 3.5e-3,
            TargetState::Antisymmetric => 1.7e-3,
        };
        BiasConfig {
            target,
            shape: DatasetShape::standard(target),
            model: ReferenceModel::default().with_leak(leak),
            n_replicates: 1000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasPoint {
    pub true_fidelity: f64,
    pub method: Method,
    pub mean_bias: f64,
    pub std_error: f64,
    pub n_replicates: usize,
    pub n_failed: usize,
}

/// Mean bias and its standard error for every fidelity and method.
pub fn bias_harness(true_fidelities: &[f64], methods: &[Method], cfg: &BiasConfig) -> Result<Vec<BiasPoint>> {
    let pmfs = reference_pmfs(&cfg.model);
    let eps = cfg.model.leak_prob;
    let mut out = Vec::new();
    for (fi, &f) in true_fidelities.iter().enumerate() {
        let rho = synthetic_state(cfg.target, f, eps)?;
        // Settings are fixed by the shape, so the linear coefficients are too.
        let mut settings = vec![Analysis::None];
        let probe = synthesize_dataset(&rho, &pmfs, cfg.target, &cfg.shape, 0, 0);
        settings.extend(probe.parity_by_phase()?.into_iter().map(|(phase, _)| Analysis::Pi2 { phase }));
        let trials: Vec<f64> = std::iter::once(probe.population_trials() as f64)
            .chain(probe.parity_by_phase()?.iter().map(|(_, h)| h.n_trials as f64))
            .collect();
        let coeffs = if methods.contains(&Method::Linear) {
            let povms: Vec<_> = settings.iter().map(|&a| povm_from_pmfs(pmfs.clone(), a)).collect();
            Some(linear_coeffs(&povms, &trials, cfg.target)?)
        } else {
            None
        };
        let runs: Vec<Vec<Option<f64>>> = (0..cfg.n_replicates as u64)
            .into_par_iter()
            .map(|r| {
                let d = synthesize_dataset(&rho, &pmfs, cfg.target, &cfg.shape, r, derive_path(cfg.seed, &[fi as u64, r]));
                methods
                    .iter()
                    .map(|m| match m {
                        Method::Parity => parity_method(&d, &pmfs, eps).ok().map(|p| p.fidelity),
                        Method::Linear => {
                            let co = coeffs.as_ref().expect("built above");
                            d.settings().ok().and_then(|s| linear_raw(&s, co).ok()).map(|raw| linear_correct(raw, co, eps))
                        }
                    })
                    .collect()
            })
            .collect();
        for (k, &m) in methods.iter().enumerate() {
            let v: Vec<f64> = runs.iter().filter_map(|r| r[k]).map(|x| x - f).collect();
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            out.push(BiasPoint {
                true_fidelity: f,
                method: m,
                mean_bias: mean,
                std_error: (var / n).sqrt(),
                n_replicates: v.len(),
                n_failed: cfg.n_replicates - v.len(),
            });
        }
    }
    Ok(out)
}
