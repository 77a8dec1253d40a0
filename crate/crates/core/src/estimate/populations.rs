//! Maximum-likelihood populations of zero, one and two bright ions.
//!
//! The count histogram is a three-component mixture with known component
//! distributions; EM updates stay on the simplex by construction.

use serde::{Deserialize, Serialize};

use crate::detect::{reference_pmfs_with_bins, CountHistogram, ReferenceModel, ReferencePmfs};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Populations {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub log_likelihood: f64,
    pub iterations: usize,
}

impl Populations {
    pub fn as_array(&self) -> [f64; 3] {
        [self.p0, self.p1, self.p2]
    }

    pub fn parity(&self) -> f64 {
        parity(self.p0, self.p1, self.p2)
    }
}

pub fn parity(p0: f64, p1: f64, p2: f64) -> f64 {
    p0 + p2 - p1
}

pub const EM_TOLERANCE: f64 = 1e-10;
pub const EM_MAX_ITER: usize = 200_000;

pub fn ml_populations(hist: &CountHistogram, model: &ReferenceModel) -> Result<Populations> {
    ml_populations_with(hist, &reference_pmfs_with_bins(model, hist.n_bins()))
}

pub fn ml_populations_with(hist: &CountHistogram, pmfs: &ReferencePmfs) -> Result<Populations> {
    if hist.n_bins() != pmfs.n_bins() {
        return Err(Error::SettingsMismatch(format!("histogram has {} bins, model {}", hist.n_bins(), pmfs.n_bins())));
    }
    if hist.n_trials == 0 {
        return Err(Error::EstimationFailed("empty histogram".into()));
    }
    let rows: Vec<(f64, [f64; 3])> = hist
        .bins
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| (c as f64, [pmfs.pmf[0][k], pmfs.pmf[1][k], pmfs.pmf[2][k]]))
        .collect();
    let n = hist.n_trials as f64;
    let mut w = [1.0 / 3.0; 3];
    let mut prev = f64::NEG_INFINITY;
    for it in 0..EM_MAX_ITER {
        let mut acc = [0.0; 3];
        let mut ll = 0.0;
        for (c, p) in &rows {
            let m = w[0] * p[0] + w[1] * p[1] + w[2] * p[2];
            if m <= 0.0 {
                return Err(Error::EstimationFailed("count with zero probability under every component".into()));
            }
            ll += c * m.ln();
            for b in 0..3 {
                acc[b] += c * w[b] * p[b] / m;
            }
        }
        w = [acc[0] / n, acc[1] / n, acc[2] / n];
        if (ll - prev).abs() < EM_TOLERANCE {
            return Ok(Populations { p0: w[0], p1: w[1], p2: w[2], log_likelihood: ll, iterations: it + 1 });
        }
        prev = ll;
    }
    Err(Error::EstimationFailed(format!("EM did not converge in {EM_MAX_ITER} iterations")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{reference_pmfs, synth::sample_pmf, Context};

    #[test]
    fn parity_examples() {
        assert_eq!(parity(0.5, 0.0, 0.5), 1.0);
        assert_eq!(parity(0.0, 1.0, 0.0), -1.0);
        assert_eq!(parity(0.25, 0.5, 0.25), 0.0);
    }

    fn draw(w: [f64; 3], n: u64, seed: u64) -> (CountHistogram, ReferencePmfs) {
        let pmfs = reference_pmfs(&ReferenceModel::default());
        let h = CountHistogram::new(Context::Population, None, sample_pmf(&pmfs.mixture(w), n, seed));
        (h, pmfs)
    }

    #[test]
    fn bright_pair_and_bell_populations() {
        let (h, pmfs) = draw([0.0, 0.0, 1.0], 4000, 1);
        let p = ml_populations_with(&h, &pmfs).unwrap();
        assert!(p.p2 > 0.998, "{p:?}");
        let (h, pmfs) = draw([0.5, 0.0, 0.5], 4000, 2);
        let p = ml_populations_with(&h, &pmfs).unwrap();
        assert!((p.p0 - 0.5).abs() < 0.03 && p.p1 < 0.003, "{p:?}");
        assert!((p.p0 + p.p1 + p.p2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixture_within_multinomial_error() {
        let n = 8000;
        let (h, pmfs) = draw([0.25, 0.5, 0.25], n, 3);
        let p = ml_populations_with(&h, &pmfs).unwrap();
        for (est, truth) in p.as_array().iter().zip([0.25, 0.5, 0.25]) {
            let se = (truth * (1.0 - truth) / n as f64).sqrt();
            assert!((est - truth).abs() < 3.0 * se, "{est} vs {truth}");
        }
    }
}
