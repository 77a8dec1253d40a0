//! Bootstrap confidence intervals.
//!
//! Each replicate resamples every experiment and reference histogram with
//! replacement, recalibrates the reference model, multiplies both Poisson
//! means by `1 + jitter·N(0, 1)` to mimic slow drifts, and reruns every
//! method on the same resample. Fidelities are truncated at 1 before the
//! percentiles are taken.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, ReferenceData};
use super::linear::LinearProgram;
use super::pipeline::{analyze, calibrate, estimate_with_pmfs, Hints, Method, OriginalAnalysis};
use crate::detect::reference_pmfs_with_bins;
use crate::estimate::leakage::MAX_LEAK;
use crate::rng::stream;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub n_boot: usize,
    pub seed: u64,
    /// Relative standard deviation added to both Poisson means.
    pub lambda_jitter: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { n_boot: 5000, seed: 0, lambda_jitter: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub method: Method,
    /// Estimate on the original data, truncated at 1.
    pub point: f64,
    /// Estimate on the original data before truncation.
    pub untruncated: f64,
    /// 16th and 84th percentiles of the truncated bootstrap fidelities.
    pub ci68: (f64, f64),
    pub mean: f64,
    pub median: f64,
    pub leakage_corrected: bool,
    pub truncated: bool,
    pub n_boot: usize,
    /// Replicates whose analysis failed and were left out.
    pub n_failed: usize,
}

/// Percentile with linear interpolation between order statistics.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Summary of truncated bootstrap values around an original estimate.
pub fn summarize(method: Method, original: f64, values: &[f64], n_failed: usize) -> FidelityEstimate {
    let mut v: Vec<f64> = values.iter().map(|x| x.min(1.0)).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    let mean = v.iter().sum::<f64>() / v.len().max(1) as f64;
    FidelityEstimate {
        method,
        point: original.min(1.0),
        untruncated: original,
        ci68: (percentile(&v, 0.16), percentile(&v, 0.84)),
        mean,
        median: percentile(&v, 0.5),
        leakage_corrected: true,
        truncated: original > 1.0,
        n_boot: v.len(),
        n_failed,
    }
}

/// One bootstrap replicate: fidelity per method (in `methods` order).
fn replicate(
    dataset: &Dataset,
    reference: &ReferenceData,
    original: &OriginalAnalysis,
    hints: &Hints,
    methods: &[Method],
    cfg: &BootstrapConfig,
    index: u64,
) -> Result<Vec<f64>> {
    let mut rng = stream(cfg.seed, index);
    let resampled = Dataset {
        id: dataset.id,
        target: dataset.target,
        population: dataset.population.iter().map(|h| h.resample(&mut rng)).collect(),
        parity: dataset.parity.iter().map(|h| h.resample(&mut rng)).collect(),
    };
    let reference = ReferenceData {
        bright: reference.bright.iter().map(|h| h.resample(&mut rng)).collect(),
        dark: reference.dark.iter().map(|h| h.resample(&mut rng)).collect(),
    };
    let mut model = calibrate(&reference, Some(&original.calibration.model))?.model;
    let jb: f64 = rng.sample(StandardNormal);
    let jd: f64 = rng.sample(StandardNormal);
    model.lambda_bright *= 1.0 + cfg.lambda_jitter * jb;
    model.lambda_dark = (model.lambda_dark * (1.0 + cfg.lambda_jitter * jd)).max(0.0);
    let eps = model.leak_prob.min(MAX_LEAK);
    let pmfs = reference_pmfs_with_bins(&model, dataset.n_bins());
    methods.iter().map(|&m| estimate_with_pmfs(&resampled, &pmfs, eps, m, hints)).collect()
}

/// Original estimates and bootstrap summaries for each method.
pub fn bootstrap(
    dataset: &Dataset,
    reference: &ReferenceData,
    methods: &[Method],
    cfg: &BootstrapConfig,
) -> Result<(OriginalAnalysis, Vec<FidelityEstimate>)> {
    if cfg.n_boot == 0 {
        return Err(Error::InvalidParameter("n_boot must be positive".into()));
    }
    let original = analyze(dataset, reference, methods)?;
    let analyses: Vec<_> = dataset.settings()?.into_iter().map(|(a, _)| a).collect();
    let hints = Hints {
        parity: original.parity_fit(),
        program: if methods.contains(&Method::Linear) { Some(LinearProgram::new(&analyses, dataset.target)?) } else { None },
    };
    let runs: Vec<Option<Vec<f64>>> =
        (0..cfg.n_boot as u64).into_par_iter().map(|b| replicate(dataset, reference, &original, &hints, methods, cfg, b).ok()).collect();
    let n_failed = runs.iter().filter(|r| r.is_none()).count();
    if n_failed == cfg.n_boot {
        return Err(Error::EstimationFailed("every bootstrap replicate failed".into()));
    }
    let estimates = methods
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let values: Vec<f64> = runs.iter().flatten().map(|r| r[k]).collect();
            summarize(m, original.fidelity(m).expect("method was analysed"), &values, n_failed)
        })
        .collect();
    Ok((original, estimates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn percentiles() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile(&v, 0.5), 3.0);
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert!((percentile(&v, 0.16) - 1.64).abs() < 1e-12);
        assert_eq!(percentile(&[0.7], 0.84), 0.7);
    }

    #[test]
    fn single_replicate_collapses() {
        let s = summarize(Method::Linear, 0.99, &[0.98], 0);
        assert_eq!(s.ci68, (0.98, 0.98));
        assert_eq!(s.median, 0.98);
    }

    proptest! {
        #[test]
        fn truncation_never_lowers(orig in 0.9f64..1.01, vals in proptest::collection::vec(0.9f64..1.01, 1..50)) {
            let s = summarize(Method::Parity, orig, &vals, 0);
            prop_assert!(s.point <= 1.0);
            prop_assert!(s.truncated == (orig > 1.0));
            prop_assert!(s.point == orig || s.point == 1.0);
            prop_assert!(s.ci68.0 <= s.ci68.1);
            prop_assert!(s.ci68.1 <= 1.0);
        }
    }
}
