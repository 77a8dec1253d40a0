//! Calibration plus fidelity estimation on one dataset.

use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, ReferenceData};
use super::linear::{coeffs_for_dataset, linear_correct, linear_raw, LinearProgram};
use super::parity::{parity_method, parity_method_from, ParityAnalysis, ParityFit};
use crate::detect::{
    calibrate_reference, calibrate_reference_from, povm_from_pmfs, reference_pmfs_with_bins, Calibration, ReferenceModel, ReferencePmfs,
};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "parity-ml")]
    Parity,
    #[serde(rename = "linear")]
    Linear,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Parity, Method::Linear];

    pub fn name(self) -> &'static str {
        match self {
            Method::Parity => "parity-ml",
            Method::Linear => "linear",
        }
    }
}

/// Leakage-corrected fidelity of `dataset` by `method` under `model`.
pub fn estimate_with_model(dataset: &Dataset, model: &ReferenceModel, method: Method) -> Result<f64> {
    let pmfs = reference_pmfs_with_bins(model, dataset.n_bins());
    estimate_with_pmfs(dataset, &pmfs, model.leak_prob, method, &Hints::default())
}

/// Work that can be shared between analyses of datasets of one shape.
#[derive(Clone, Debug, Default)]
pub struct Hints {
    /// Starting point of the parity oscillation fit.
    pub parity: Option<ParityFit>,
    pub program: Option<LinearProgram>,
}

/// Fidelity by `method`.
pub fn estimate_with_pmfs(dataset: &Dataset, pmfs: &ReferencePmfs, eps: f64, method: Method, hints: &Hints) -> Result<f64> {
    match method {
        Method::Parity => Ok(parity_method_from(dataset, pmfs, eps, hints.parity.as_ref())?.fidelity),
        Method::Linear => {
            let (settings, coeffs) = coeffs_for_dataset(dataset, |a| povm_from_pmfs(pmfs.clone(), a), hints.program.as_ref())?;
            Ok(linear_correct(linear_raw(&settings, &coeffs)?, &coeffs, eps))
        }
    }
}

/// Reference calibration, reusing `start` as the search origin when given.
pub fn calibrate(reference: &ReferenceData, start: Option<&ReferenceModel>) -> Result<Calibration> {
    let (bright, dark) = reference.pooled()?;
    match start {
        Some(m) => calibrate_reference_from(&bright, &dark, m),
        None => calibrate_reference(&bright, &dark),
    }
}

/// Everything estimated from the original data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OriginalAnalysis {
    pub calibration: Calibration,
    pub parity: Option<ParityAnalysis>,
    pub linear: Option<f64>,
}

impl OriginalAnalysis {
    pub fn fidelity(&self, method: Method) -> Option<f64> {
        match method {
            Method::Parity => self.parity.as_ref().map(|p| p.fidelity),
            Method::Linear => self.linear,
        }
    }

    pub fn parity_fit(&self) -> Option<ParityFit> {
        self.parity.as_ref().and_then(|p| p.fit)
    }
}

/// Calibrates on `reference` and runs the requested methods.
pub fn analyze(dataset: &Dataset, reference: &ReferenceData, methods: &[Method]) -> Result<OriginalAnalysis> {
    dataset.validate()?;
    let calibration = calibrate(reference, None)?;
    if dataset.n_bins() != reference.bright[0].n_bins() {
        return Err(crate::Error::SettingsMismatch("dataset and reference histograms have different bins".into()));
    }
    let pmfs = reference_pmfs_with_bins(&calibration.model, dataset.n_bins());
    let eps = calibration.model.leak_prob;
    let mut parity = None;
    let mut linear = None;
    for &m in methods {
        match m {
            Method::Parity => parity = Some(parity_method(dataset, &pmfs, eps)?),
            Method::Linear => linear = Some(estimate_with_pmfs(dataset, &pmfs, eps, Method::Linear, &Hints::default())?),
        }
    }
    Ok(OriginalAnalysis { calibration, parity, linear })
}
