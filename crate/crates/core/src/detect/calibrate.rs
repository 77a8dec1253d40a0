//! Maximum-likelihood calibration of the reference model.
//!
//! The bright reference is |↓↓⟩ prepared with leakage `ε` per ion; the dark
//! reference is the same preparation followed by a π pulse. Both histograms
//! are fitted jointly for `(λ_b, λ_d, repump, depump, ε)`. Uncertainties come
//! from the expected Fisher information, which stays well defined when a
//! rate sits on its boundary at zero.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::histogram::CountHistogram;
use super::model::{reference_pmfs_with_bins, ReferenceModel};
use crate::optim::NelderMead;
use crate::{Error, Result};

pub const MIN_REFERENCE_TRIALS: u64 = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub model: ReferenceModel,
    /// One-standard-deviation uncertainties, field by field.
    pub sigma: ReferenceModel,
    pub log_likelihood: f64,
}

fn to_model(x: &[f64]) -> ReferenceModel {
    ReferenceModel { lambda_bright: x[0], lambda_dark: x[1], repump_rate: x[2], depump_rate: x[3], leak_prob: x[4] }
}

fn to_vec(m: &ReferenceModel) -> [f64; 5] {
    [m.lambda_bright, m.lambda_dark, m.repump_rate, m.depump_rate, m.leak_prob]
}

/// Expected bright- and dark-reference distributions.
fn expected(x: &[f64], n_bins: usize) -> (Vec<f64>, Vec<f64>) {
    let pmfs = reference_pmfs_with_bins(&to_model(x), n_bins);
    (pmfs.bright_reference(x[4]), pmfs.dark_reference())
}

fn log_likelihood(x: &[f64], bright: &CountHistogram, dark: &CountHistogram) -> f64 {
    let (pb, pd) = expected(x, bright.n_bins());
    let ll = |p: &[f64], h: &CountHistogram| -> f64 {
        h.bins.iter().zip(p).filter(|(&c, _)| c > 0).map(|(&c, &q)| c as f64 * q.max(1e-300).ln()).sum()
    };
    ll(&pb, bright) + ll(&pd, dark)
}

fn check(h: &CountHistogram, name: &str) -> Result<()> {
    h.validate()?;
    if h.n_trials < MIN_REFERENCE_TRIALS {
        return Err(Error::CalibrationFailed(format!("{name} reference has {} trials, need at least {MIN_REFERENCE_TRIALS}", h.n_trials)));
    }
    if h.is_degenerate() {
        return Err(Error::CalibrationFailed(format!("{name} reference histogram has all trials in one bin")));
    }
    Ok(())
}

/// Fits the model to bright and dark reference histograms.
pub fn calibrate_reference(bright: &CountHistogram, dark: &CountHistogram) -> Result<Calibration> {
    check_pair(bright, dark)?;
    let start = ReferenceModel {
        lambda_bright: 0.5 * bright.mean(),
        lambda_dark: (0.5 * dark.mean()).max(1e-3),
        repump_rate: 0.005,
        depump_rate: 0.005,
        leak_prob: 0.005,
    };
    let objective = |x: &[f64]| {
        if to_model(x).validate().is_err() {
            return f64::INFINITY;
        }
        -log_likelihood(x, bright, dark)
    };
    let x0 = to_vec(&start);
    let step = [0.02 * x0[0], 0.05 * x0[1].max(0.05), 0.002, 0.002, 0.002];
    let nm = NelderMead { max_iter: 20_000, f_tol: 1e-9, x_tol: 1e-9 };
    let coarse = nm.minimize(objective, &x0, &step);
    if !coarse.value.is_finite() {
        return Err(Error::CalibrationFailed("likelihood maximisation found no valid model".into()));
    }
    let x = match fisher_scoring(&coarse.x, bright, dark) {
        Some(x) => x,
        None => {
            let restart = [0.005 * coarse.x[0], 0.01 * coarse.x[1].max(0.05), 5e-4, 5e-4, 5e-4];
            nm.minimize(objective, &coarse.x, &restart).x
        }
    };
    finish(&x, bright, dark)
}

/// As [`calibrate_reference`], iterating from a nearby model such as the
/// fit to the original data when calibrating bootstrap resamples.
pub fn calibrate_reference_from(bright: &CountHistogram, dark: &CountHistogram, start: &ReferenceModel) -> Result<Calibration> {
    check_pair(bright, dark)?;
    match fisher_scoring(&to_vec(start), bright, dark) {
        Some(x) => finish(&x, bright, dark),
        None => calibrate_reference(bright, dark),
    }
}

fn check_pair(bright: &CountHistogram, dark: &CountHistogram) -> Result<()> {
    check(bright, "bright")?;
    check(dark, "dark")?;
    if bright.n_bins() != dark.n_bins() {
        return Err(Error::SettingsMismatch(format!("reference histograms have {} and {} bins", bright.n_bins(), dark.n_bins())));
    }
    if bright.mean() <= dark.mean() {
        return Err(Error::CalibrationFailed("bright reference is not brighter than dark reference".into()));
    }
    Ok(())
}

fn finish(x: &[f64], bright: &CountHistogram, dark: &CountHistogram) -> Result<Calibration> {
    let model = to_model(x);
    model.validate().map_err(|e| Error::CalibrationFailed(e.to_string()))?;
    let sigma = to_model(&fisher_sigma(x, bright, dark));
    Ok(Calibration { model, sigma, log_likelihood: log_likelihood(x, bright, dark) })
}

/// Expected distributions and their parameter derivatives.
struct Derivatives {
    pb: Vec<f64>,
    pd: Vec<f64>,
    grads: Vec<(Vec<f64>, Vec<f64>)>,
}

fn derivatives(x: &[f64], n_bins: usize) -> Derivatives {
    let (pb, pd) = expected(x, n_bins);
    let mut grads: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(5);
    for i in 0..5 {
        let h = if i < 2 { 1e-5 * x[i].max(1.0) } else { 1e-6 };
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        // One-sided difference for parameters at the lower bound.
        let central = x[i] - h >= 0.0;
        if central {
            xm[i] -= h;
        }
        let (bp, dp) = expected(&xp, n_bins);
        let (bm, dm) = if central { expected(&xm, n_bins) } else { (pb.clone(), pd.clone()) };
        let denom = if central { 2.0 * h } else { h };
        grads
            .push((bp.iter().zip(&bm).map(|(a, b)| (a - b) / denom).collect(), dp.iter().zip(&dm).map(|(a, b)| (a - b) / denom).collect()));
    }
    Derivatives { pb, pd, grads }
}

/// Expected Fisher information and score at `x`.
fn information_and_score(x: &[f64], bright: &CountHistogram, dark: &CountHistogram) -> (DMatrix<f64>, [f64; 5]) {
    let n_bins = bright.n_bins();
    let Derivatives { pb, pd, grads } = derivatives(x, n_bins);
    let (nb, nd) = (bright.n_trials as f64, dark.n_trials as f64);
    let mut info = DMatrix::<f64>::zeros(5, 5);
    let mut score = [0.0; 5];
    for k in 0..n_bins {
        let (ib, id) = (if pb[k] > 1e-300 { 1.0 / pb[k] } else { 0.0 }, if pd[k] > 1e-300 { 1.0 / pd[k] } else { 0.0 });
        for a in 0..5 {
            score[a] += bright.bins[k] as f64 * grads[a].0[k] * ib + dark.bins[k] as f64 * grads[a].1[k] * id;
            for b in 0..=a {
                info[(a, b)] += nb * grads[a].0[k] * grads[b].0[k] * ib + nd * grads[a].1[k] * grads[b].1[k] * id;
            }
        }
    }
    for a in 0..5 {
        for b in 0..a {
            info[(b, a)] = info[(a, b)];
        }
    }
    (info, score)
}

/// Projected Fisher scoring; `None` if it fails to converge.
fn fisher_scoring(x0: &[f64], bright: &CountHistogram, dark: &CountHistogram) -> Option<Vec<f64>> {
    let valid = |x: &[f64]| to_model(x).validate().is_ok();
    if !valid(x0) {
        return None;
    }
    let mut x = x0.to_vec();
    let mut ll = log_likelihood(&x, bright, dark);
    for _ in 0..50 {
        let (info, score) = information_and_score(&x, bright, dark);
        // Parameters held at zero while the score pushes them below it.
        let free: Vec<usize> = (0..5).filter(|&i| !(i >= 1 && x[i] <= 0.0 && score[i] <= 0.0)).collect();
        let sub = DMatrix::from_fn(free.len(), free.len(), |r, c| info[(free[r], free[c])]);
        let rhs = nalgebra::DVector::from_iterator(free.len(), free.iter().map(|&i| score[i]));
        let step = sub.cholesky()?.solve(&rhs);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial = x.clone();
            for (r, &i) in free.iter().enumerate() {
                trial[i] += t * step[r];
                if i >= 1 {
                    trial[i] = trial[i].max(0.0);
                }
            }
            if valid(&trial) {
                let l = log_likelihood(&trial, bright, dark);
                if l >= ll - 1e-12 {
                    accepted = Some((trial, l));
                    break;
                }
            }
            t *= 0.5;
        }
        let (trial, l) = accepted?;
        let moved = trial.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let gain = l - ll;
        x = trial;
        ll = l;
        if gain < 1e-9 && moved < 1e-9 * x[0].max(1.0) {
            return Some(x);
        }
    }
    None
}

/// Standard errors from the inverse expected Fisher information.
fn fisher_sigma(x: &[f64], bright: &CountHistogram, dark: &CountHistogram) -> [f64; 5] {
    let (info, _) = information_and_score(x, bright, dark);
    match info.try_inverse() {
        Some(cov) => std::array::from_fn(|i| cov[(i, i)].max(0.0).sqrt()),
        None => [f64::NAN; 5],
    }
}
