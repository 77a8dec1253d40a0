//! Photon-count histograms and their JSON file format.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// What a histogram was recorded for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Context {
    Population,
    Parity,
    ReferenceBright,
    ReferenceDark,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountHistogram {
    pub context: Context,
    /// Analysis phase for parity histograms, in milliradians.
    #[serde(default)]
    pub phase_milliradians: Option<f64>,
    pub n_trials: u64,
    /// `bins[k]`: number of detections with `k` counts; the last bin also
    /// holds every larger count.
    pub bins: Vec<u64>,
}

impl CountHistogram {
    pub fn new(context: Context, phase_milliradians: Option<f64>, bins: Vec<u64>) -> Self {
        let n_trials = bins.iter().sum();
        CountHistogram { context, phase_milliradians, n_trials, bins }
    }

    /// Histogram of raw per-trial counts, overflow folded into bin `n_bins − 1`.
    pub fn from_counts(context: Context, phase_milliradians: Option<f64>, counts: &[usize], n_bins: usize) -> Self {
        let mut bins = vec![0u64; n_bins];
        for &k in counts {
            bins[k.min(n_bins - 1)] += 1;
        }
        Self::new(context, phase_milliradians, bins)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins.is_empty() {
            return Err(Error::InvalidParameter("histogram has no bins".into()));
        }
        let total: u64 = self.bins.iter().sum();
        if total != self.n_trials {
            return Err(Error::InvalidParameter(format!("bins sum to {total} but n_trials is {}", self.n_trials)));
        }
        if (self.context == Context::Parity) != self.phase_milliradians.is_some() {
            return Err(Error::InvalidParameter("exactly the parity histograms carry an analysis phase".into()));
        }
        Ok(())
    }

    /// Analysis phase in radians, if any.
    pub fn phase(&self) -> Option<f64> {
        self.phase_milliradians.map(|m| m * 1e-3)
    }

    pub fn n_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn mean(&self) -> f64 {
        let s: f64 = self.bins.iter().enumerate().map(|(k, &c)| k as f64 * c as f64).sum();
        s / self.n_trials.max(1) as f64
    }

    /// True when all trials fall into a single bin.
    pub fn is_degenerate(&self) -> bool {
        self.bins.iter().filter(|&&c| c > 0).count() <= 1
    }

    /// Adds another histogram with the same bins and context.
    pub fn merge(&mut self, other: &CountHistogram) -> Result<()> {
        if other.bins.len() != self.bins.len() {
            return Err(Error::SettingsMismatch(format!("bin counts differ: {} vs {}", self.bins.len(), other.bins.len())));
        }
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.n_trials += other.n_trials;
        Ok(())
    }

    /// Per-trial counts in ascending order.
    pub fn expand(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n_trials as usize);
        for (k, &c) in self.bins.iter().enumerate() {
            out.extend(std::iter::repeat_n(k, c as usize));
        }
        out
    }

    /// Resample `n_trials` detections with replacement.
    pub fn resample<R: Rng>(&self, rng: &mut R) -> CountHistogram {
        let n = self.n_trials as usize;
        let mut bins = vec![0u64; self.bins.len()];
        if n == 0 {
            return self.clone();
        }
        // Inverse CDF over the cumulative bin counts.
        let cum: Vec<u64> = self
            .bins
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect();
        for _ in 0..n {
            let r = rng.random_range(0..self.n_trials);
            let k = cum.partition_point(|&c| c <= r);
            bins[k] += 1;
        }
        CountHistogram { bins, ..self.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let h: CountHistogram = serde_json::from_str(s)?;
        h.validate()?;
        Ok(h)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Sum of several histograms with equal bins.
pub fn pool(hists: &[CountHistogram]) -> Result<CountHistogram> {
    let first = hists.first().ok_or_else(|| Error::InvalidParameter("no histograms to pool".into()))?;
    let mut acc = first.clone();
    for h in &hists[1..] {
        acc.merge(h)?;
    }
    Ok(acc)
}
