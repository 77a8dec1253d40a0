//! Experiment datasets, reference data and the on-disk bundle format.
//!
//! A bundle is a directory holding one JSON file per histogram and a
//! `manifest.json` that lists them:
//!
//! ```json
//! { "dataset_id": 7, "target_state": "symmetric", "phases": [0.0, 120.83],
//!   "population_files": ["population_000.json"], "parity_files": ["parity_000.json"],
//!   "reference_files": { "bright": ["reference_bright_000.json"], "dark": ["reference_dark_000.json"] } }
//! ```
//!
//! `phases` holds the analysis phase of each parity file in milliradians.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::states::TargetState;
use crate::detect::synth::sample_pmf;
use crate::detect::{pool, synthesize_with_pmfs, Analysis, Context, CountHistogram, ReferenceModel, ReferencePmfs};
use crate::hilbert::CMat;
use crate::rng::derive_path;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub id: u64,
    pub target: TargetState,
    pub population: Vec<CountHistogram>,
    pub parity: Vec<CountHistogram>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceData {
    pub bright: Vec<CountHistogram>,
    pub dark: Vec<CountHistogram>,
}

impl ReferenceData {
    pub fn pooled(&self) -> Result<(CountHistogram, CountHistogram)> {
        if self.bright.is_empty() || self.dark.is_empty() {
            return Err(Error::CalibrationFailed("reference data missing".into()));
        }
        Ok((pool(&self.bright)?, pool(&self.dark)?))
    }
}

/// Sizes and analysis phases of a dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetShape {
    pub population_sets: usize,
    pub trials_per_set: u64,
    /// Analysis phase of every parity set, in radians.
    pub parity_phases: Vec<f64>,
}

impl DatasetShape {
    /// 40 population sets and 52 parity sets of 200 trials; for |Ψ₋⟩ the
    /// parity sets cycle seven times through the six multiples of π/3.
    pub fn standard(target: TargetState) -> Self {
        let parity_phases = match target {
            TargetState::Symmetric => (0..52).map(|k| TAU * k as f64 / 52.0).collect(),
            TargetState::Antisymmetric => (0..42).map(|k| (k % 6) as f64 * PI / 3.0).collect(),
        };
        DatasetShape { population_sets: 40, trials_per_set: 200, parity_phases }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials_per_set == 0 {
            return Err(Error::InvalidParameter("sets need at least one trial".into()));
        }
        if self.population_sets == 0 && self.parity_phases.is_empty() {
            return Err(Error::InvalidParameter("dataset shape has no sets".into()));
        }
        if self.parity_phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("parity phases must be finite".into()));
        }
        Ok(())
    }
}

/// Phase key used to group parity sets, in microradians modulo 2π.
fn phase_key(phase: f64) -> i64 {
    ((phase.rem_euclid(TAU) * 1e6).round() as i64) % ((TAU * 1e6).round() as i64)
}

impl Dataset {
    pub fn validate(&self) -> Result<()> {
        for h in self.population.iter().chain(&self.parity) {
            h.validate()?;
            if h.n_trials == 0 {
                return Err(Error::InvalidParameter("empty histogram set".into()));
            }
        }
        if self.population.iter().any(|h| h.context != Context::Population) || self.parity.iter().any(|h| h.context != Context::Parity) {
            return Err(Error::InvalidParameter("histogram context does not match its section".into()));
        }
        Ok(())
    }

    pub fn n_bins(&self) -> usize {
        self.population.first().or(self.parity.first()).map_or(0, |h| h.n_bins())
    }

    pub fn population_trials(&self) -> u64 {
        self.population.iter().map(|h| h.n_trials).sum()
    }

    /// Parity sets pooled by analysis phase, in ascending phase order.
    pub fn parity_by_phase(&self) -> Result<Vec<(f64, CountHistogram)>> {
        let mut groups: BTreeMap<i64, Vec<CountHistogram>> = BTreeMap::new();
        for h in &self.parity {
            let phase = h.phase().ok_or_else(|| Error::InvalidParameter("parity histogram without phase".into()))?;
            groups.entry(phase_key(phase)).or_default().push(h.clone());
        }
        groups.into_iter().map(|(k, hs)| Ok((k as f64 * 1e-6, pool(&hs)?))).collect()
    }

    /// Every measurement setting with its pooled histogram: the population
    /// setting first, then parity phases in ascending order.
    pub fn settings(&self) -> Result<Vec<(Analysis, CountHistogram)>> {
        let mut out = Vec::new();
        if !self.population.is_empty() {
            out.push((Analysis::None, pool(&self.population)?));
        }
        for (phase, h) in self.parity_by_phase()? {
            out.push((Analysis::Pi2 { phase }, h));
        }
        Ok(out)
    }
}

/// Draws a dataset of the given shape from the state `rho`.
pub fn synthesize_dataset(rho: &CMat, pmfs: &ReferencePmfs, target: TargetState, shape: &DatasetShape, id: u64, seed: u64) -> Dataset {
    let population = (0..shape.population_sets)
        .map(|i| synthesize_with_pmfs(rho, pmfs, Analysis::None, shape.trials_per_set, derive_path(seed, &[id, 0, i as u64])))
        .collect();
    let parity = shape
        .parity_phases
        .iter()
        .enumerate()
        .map(|(i, &phase)| {
            synthesize_with_pmfs(rho, pmfs, Analysis::Pi2 { phase }, shape.trials_per_set, derive_path(seed, &[id, 1, i as u64]))
        })
        .collect();
    Dataset { id, target, population, parity }
}

/// Reference histograms in `sets` sets of `trials_per_set` each.
pub fn synthesize_reference_data(
    model: &ReferenceModel,
    pmfs: &ReferencePmfs,
    sets: usize,
    trials_per_set: u64,
    seed: u64,
) -> ReferenceData {
    let bright_pmf = pmfs.bright_reference(model.leak_prob);
    let dark_pmf = pmfs.dark_reference();
    let make = |pmf: &[f64], ctx, kind| {
        (0..sets).map(|i| CountHistogram::new(ctx, None, sample_pmf(pmf, trials_per_set, derive_path(seed, &[kind, i as u64])))).collect()
    };
    ReferenceData { bright: make(&bright_pmf, Context::ReferenceBright, 2), dark: make(&dark_pmf, Context::ReferenceDark, 3) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFiles {
    pub bright: Vec<String>,
    pub dark: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub dataset_id: u64,
    pub target_state: TargetState,
    pub phases: Vec<f64>,
    pub population_files: Vec<String>,
    pub parity_files: Vec<String>,
    pub reference_files: ReferenceFiles,
}

pub const BUNDLE_MANIFEST: &str = "manifest.json";

/// Writes a bundle into `dir` and returns the paths written, manifest last.
pub fn write_bundle(dir: &Path, dataset: &Dataset, reference: &ReferenceData) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut save = |prefix: &str, hs: &[CountHistogram]| -> Result<Vec<String>> {
        hs.iter()
            .enumerate()
            .map(|(i, h)| {
                let name = format!("{prefix}_{i:03}.json");
                let path = dir.join(&name);
                h.write(&path)?;
                written.push(path);
                Ok(name)
            })
            .collect()
    };
    let population_files = save("population", &dataset.population)?;
    let parity_files = save("parity", &dataset.parity)?;
    let bright = save("reference_bright", &reference.bright)?;
    let dark = save("reference_dark", &reference.dark)?;
    let manifest = BundleManifest {
        dataset_id: dataset.id,
        target_state: dataset.target,
        phases: dataset.parity.iter().map(|h| h.phase_milliradians.unwrap_or(0.0)).collect(),
        population_files,
        parity_files,
        reference_files: ReferenceFiles { bright, dark },
    };
    let path = dir.join(BUNDLE_MANIFEST);
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    written.push(path);
    Ok(written)
}

/// Reads a bundle written by [`write_bundle`].
pub fn read_bundle(dir: &Path) -> Result<(Dataset, ReferenceData)> {
    let manifest: BundleManifest = serde_json::from_str(&std::fs::read_to_string(dir.join(BUNDLE_MANIFEST))?)?;
    let load = |names: &[String]| -> Result<Vec<CountHistogram>> { names.iter().map(|n| CountHistogram::read(&dir.join(n))).collect() };
    if manifest.phases.len() != manifest.parity_files.len() {
        return Err(Error::InvalidParameter("manifest lists a different number of phases and parity files".into()));
    }
    let parity = load(&manifest.parity_files)?;
    for (h, &p) in parity.iter().zip(&manifest.phases) {
        if h.phase_milliradians.map_or(true, |q| (q - p).abs() > 1e-6) {
            return Err(Error::InvalidParameter("parity file phase disagrees with manifest".into()));
        }
    }
    let dataset = Dataset { id: manifest.dataset_id, target: manifest.target_state, population: load(&manifest.population_files)?, parity };
    dataset.validate()?;
    let refs = &manifest.reference_files;
    if refs.bright.is_empty() || refs.dark.is_empty() {
        return Err(Error::CalibrationFailed("bundle has no reference data".into()));
    }
    if let Some(missing) = refs.bright.iter().chain(&refs.dark).find(|n| !dir.join(n).is_file()) {
        return Err(Error::CalibrationFailed(format!("reference file {missing} is missing")));
    }
    let reference = ReferenceData { bright: load(&refs.bright)?, dark: load(&refs.dark)? };
    Ok((dataset, reference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::reference_pmfs;

    #[test]
    fn standard_shapes() {
        let s = DatasetShape::standard(TargetState::Symmetric);
        assert_eq!((s.population_sets, s.trials_per_set, s.parity_phases.len()), (40, 200, 52));
        let a = DatasetShape::standard(TargetState::Antisymmetric);
        assert_eq!(a.parity_phases.len(), 42);
    }

    #[test]
    fn bundle_round_trip_and_grouping() {
        let model = ReferenceModel::default();
        let pmfs = reference_pmfs(&model);
        let rho = TargetState::Antisymmetric.projector();
        let shape = DatasetShape::standard(TargetState::Antisymmetric);
        let d = synthesize_dataset(&rho, &pmfs, TargetState::Antisymmetric, &shape, 4, 1);
        let r = synthesize_reference_data(&model, &pmfs, 2, 1000, 2);
        let dir = tempfile::tempdir().unwrap();
        let files = write_bundle(dir.path(), &d, &r).unwrap();
        assert_eq!(files.len(), 40 + 42 + 4 + 1);
        let (d2, r2) = read_bundle(dir.path()).unwrap();
        assert_eq!(d2, d);
        assert_eq!(r2, r);
        let groups = d.parity_by_phase().unwrap();
        assert_eq!(groups.len(), 6);
        assert!(groups.iter().all(|(_, h)| h.n_trials == 1400));
        assert_eq!(d.settings().unwrap().len(), 7);
    }
}
