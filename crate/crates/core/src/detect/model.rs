//! Photon-count distributions of zero, one and two fluorescing ions.
//!
//! Each ion emits Poissonian counts at `λ_b` (bright) or `λ_d` (dark). With
//! probability `depump_rate` a bright ion goes dark, and with probability
//! `repump_rate` a dark ion goes bright, at a time uniformly distributed over
//! the detection window. Averaging the Poisson law over the switch time gives
//! `(1/(b−a))∫_a^b Pois(k; μ) dμ = (F(k; a) − F(k; b))/(b − a)` with `F` the
//! Poisson CDF, so every distribution here is closed form.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceModel {
    /// Mean counts of one bright ion per detection.
    pub lambda_bright: f64,
    /// Mean counts of one dark ion per detection.
    pub lambda_dark: f64,
    /// Probability per detection that a dark ion brightens.
    pub repump_rate: f64,
    /// Probability per detection that a bright ion darkens.
    pub depump_rate: f64,
    /// Probability per ion of being prepared in the leaked level.
    pub leak_prob: f64,
}

impl Default for ReferenceModel {
    fn default() -> Self {
        ReferenceModel { lambda_bright: 30.0, lambda_dark: 1.0, repump_rate: 0.005, depump_rate: 0.005, leak_prob: 0.0 }
    }
}

impl ReferenceModel {
    pub fn with_leak(self, leak_prob: f64) -> Self {
        ReferenceModel { leak_prob, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_dark >= 0.0) || !(self.lambda_bright > self.lambda_dark) || !self.lambda_bright.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need lambda_bright > lambda_dark >= 0, got {} and {}",
                self.lambda_bright, self.lambda_dark
            )));
        }
        for (name, v) in [("repump_rate", self.repump_rate), ("depump_rate", self.depump_rate), ("leak_prob", self.leak_prob)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }

    /// Highest count bin, `⌈2λ_b + 8√(2λ_b)⌉`; the last bin holds all larger counts.
    pub fn max_count(&self) -> usize {
        let two = 2.0 * self.lambda_bright;
        (two + 8.0 * two.sqrt()).ceil() as usize
    }

    pub fn n_bins(&self) -> usize {
        self.max_count() + 1
    }
}

/// Count distributions of zero, one and two bright ions over a common set of bins.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferencePmfs {
    /// `pmf[b][k]`: probability of `k` counts with `b` bright ions.
    pub pmf: [Vec<f64>; 3],
}

impl ReferencePmfs {
    pub fn n_bins(&self) -> usize {
        self.pmf[0].len()
    }

    /// Count distribution for bright-ion-number weights `w`.
    pub fn mixture(&self, w: [f64; 3]) -> Vec<f64> {
        (0..self.n_bins()).map(|k| w[0] * self.pmf[0][k] + w[1] * self.pmf[1][k] + w[2] * self.pmf[2][k]).collect()
    }

    /// Expected bright-reference distribution: |↓↓⟩ prepared with leakage `ε`
    /// per ion, a leaked ion being dark.
    pub fn bright_reference(&self, eps: f64) -> Vec<f64> {
        self.mixture([eps * eps, 2.0 * eps * (1.0 - eps), (1.0 - eps) * (1.0 - eps)])
    }

    /// Expected dark-reference distribution (after a π pulse no ion fluoresces).
    pub fn dark_reference(&self) -> Vec<f64> {
        self.pmf[0].clone()
    }
}

/// Distributions over the model's default bins.
pub fn reference_pmfs(model: &ReferenceModel) -> ReferencePmfs {
    reference_pmfs_with_bins(model, model.n_bins())
}

/// Distributions over `n_bins` bins, the last one collecting the overflow.
pub fn reference_pmfs_with_bins(model: &ReferenceModel, n_bins: usize) -> ReferencePmfs {
    let n_bins = n_bins.max(2);
    let dark = single_ion_pmf(model.lambda_dark, model.lambda_bright, model.repump_rate, n_bins);
    let bright = single_ion_pmf(model.lambda_bright, model.lambda_dark, model.depump_rate, n_bins);
    let fold = |mut v: Vec<f64>| {
        let head: f64 = v[..n_bins - 1].iter().sum();
        v.truncate(n_bins);
        v[n_bins - 1] = (1.0 - head).max(0.0);
        v
    };
    ReferencePmfs {
        pmf: [fold(convolve(&dark, &dark, n_bins)), fold(convolve(&bright, &dark, n_bins)), fold(convolve(&bright, &bright, n_bins))],
    }
}

/// One ion starting at rate `start`, switching with probability `p` to rate
/// `end` at a uniform time; exact probabilities for counts `0..n`.
pub fn single_ion_pmf(start: f64, end: f64, p: f64, n: usize) -> Vec<f64> {
    let stay = poisson_pmf(start, n);
    if p == 0.0 {
        return stay;
    }
    let switched = switched_pmf(start, end, n);
    stay.iter().zip(&switched).map(|(a, b)| (1.0 - p) * a + p * b).collect()
}

/// `Pois(k; μ)` for `k < n` by upward recurrence.
pub fn poisson_pmf(mu: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    if mu == 0.0 {
        out[0] = 1.0;
        return out;
    }
    // Start from the log to survive large means.
    let mut p = (-mu).exp();
    out[0] = p;
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        p *= mu / k as f64;
        *slot = p;
    }
    out
}

/// Poisson law averaged over a mean moving linearly from `a` to `b`.
fn switched_pmf(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if hi - lo < 1e-9 * hi.max(1.0) {
        return poisson_pmf(0.5 * (a + b), n);
    }
    // Lower and upper tails of both Poisson laws, each summed in the
    // direction that avoids cancellation.
    let tail = n + 40 + (10.0 * hi.sqrt()) as usize + hi as usize;
    let p_lo = poisson_pmf(lo, tail);
    let p_hi = poisson_pmf(hi, tail);
    let cdf = |p: &[f64]| {
        let mut acc = 0.0;
        p.iter()
            .map(|x| {
                acc += x;
                acc
            })
            .collect::<Vec<f64>>()
    };
    let sf = |p: &[f64]| {
        let mut out = vec![0.0; p.len()];
        let mut acc = 0.0;
        for k in (0..p.len()).rev() {
            out[k] = acc;
            acc += p[k];
        }
        out
    };
    let (c_lo, c_hi, s_lo, s_hi) = (cdf(&p_lo), cdf(&p_hi), sf(&p_lo), sf(&p_hi));
    (0..n)
        .map(|k| {
            let diff = if c_lo[k] < 0.5 { c_lo[k] - c_hi[k] } else { s_hi[k] - s_lo[k] };
            (diff / (hi - lo)).max(0.0)
        })
        .collect()
}

fn convolve(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}
