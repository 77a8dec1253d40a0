//! Parity analysis: joint maximum-likelihood fit of the parity oscillation
//! and the population-plus-parity fidelity.
//!
//! After a global π/2 analysis pulse of phase `φ` the two-ion parity is
//! `Π(φ) = c + A sin(2φ + φ₀)`. Each phase contributes the likelihood of its
//! raw counts under `P1 = (1 − Π)/2`, `P2 = w(1 − P1)`, `P0 = (1 − w)(1 − P1)`,
//! so no per-phase parity is ever estimated.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::leakage::correct_leakage;
use super::populations::{ml_populations_with, Populations};
use super::states::TargetState;
use crate::detect::{pool, CountHistogram, ReferencePmfs};
use crate::optim::NelderMead;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityFit {
    /// Oscillation amplitude `A ∈ [0, 1]`.
    pub amplitude: f64,
    /// `φ₀` in radians.
    pub phase_offset: f64,
    /// Constant parity offset `c`.
    pub offset: f64,
    /// Share `w` of the even population that is two-bright.
    pub asymmetry: f64,
    pub log_likelihood: f64,
}

pub const MIN_PHASES: usize = 4;

struct PhaseRows {
    s: f64,
    c: f64,
    rows: Vec<(f64, [f64; 3])>,
}

fn rows_of(h: &CountHistogram, pmfs: &ReferencePmfs) -> Vec<(f64, [f64; 3])> {
    h.bins.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (c as f64, [pmfs.pmf[0][k], pmfs.pmf[1][k], pmfs.pmf[2][k]])).collect()
}

/// Crude bright-ion fractions by thresholding counts between component means.
fn threshold_fractions(h: &CountHistogram, pmfs: &ReferencePmfs) -> [f64; 3] {
    let mean = |p: &[f64]| p.iter().enumerate().map(|(k, x)| k as f64 * x).sum::<f64>();
    let (m0, m1, m2) = (mean(&pmfs.pmf[0]), mean(&pmfs.pmf[1]), mean(&pmfs.pmf[2]));
    let (t1, t2) = (0.5 * (m0 + m1), 0.5 * (m1 + m2));
    let mut f = [0.0; 3];
    for (k, &c) in h.bins.iter().enumerate() {
        let b = if (k as f64) < t1 {
            0
        } else if (k as f64) < t2 {
            1
        } else {
            2
        };
        f[b] += c as f64;
    }
    let n = h.n_trials.max(1) as f64;
    [f[0] / n, f[1] / n, f[2] / n]
}

/// Joint fit over `(phase, histogram)` pairs; phases in radians.
pub fn fit_parity_oscillation(groups: &[(f64, CountHistogram)], pmfs: &ReferencePmfs) -> Result<ParityFit> {
    fit_parity_oscillation_from(groups, pmfs, None)
}

/// As [`fit_parity_oscillation`], searching first around `start` if given.
pub fn fit_parity_oscillation_from(groups: &[(f64, CountHistogram)], pmfs: &ReferencePmfs, start: Option<&ParityFit>) -> Result<ParityFit> {
    let distinct = {
        let mut p: Vec<i64> = groups.iter().map(|(ph, _)| (ph.rem_euclid(2.0 * PI) * 1e6).round() as i64).collect();
        p.sort_unstable();
        p.dedup();
        p.len()
    };
    if distinct < MIN_PHASES {
        return Err(Error::EstimationFailed(format!("parity fit needs at least {MIN_PHASES} distinct phases, got {distinct}")));
    }
    if let Some((_, h)) = groups.iter().find(|(_, h)| h.n_bins() != pmfs.n_bins()) {
        return Err(Error::SettingsMismatch(format!("histogram has {} bins, model {}", h.n_bins(), pmfs.n_bins())));
    }
    let data: Vec<PhaseRows> =
        groups.iter().map(|(ph, h)| PhaseRows { s: (2.0 * ph).sin(), c: (2.0 * ph).cos(), rows: rows_of(h, pmfs) }).collect();

    let nll = |x: &[f64]| -> f64 {
        let (a, b, c, w) = (x[0], x[1], x[2], x[3]);
        if !(0.0..=1.0).contains(&w) || (a * a + b * b).sqrt() + c.abs() > 1.0 {
            return f64::INFINITY;
        }
        let mut ll = 0.0;
        for d in &data {
            let par = c + a * d.s + b * d.c;
            let p1 = 0.5 * (1.0 - par);
            let (p0, p2) = ((1.0 - w) * (1.0 - p1), w * (1.0 - p1));
            for (cnt, p) in &d.rows {
                let m = p0 * p[0] + p1 * p[1] + p2 * p[2];
                if m <= 0.0 {
                    return f64::INFINITY;
                }
                ll += cnt * m.ln();
            }
        }
        -ll
    };

    // Log-likelihood changes below 1e-8 move the fidelity far less than 1e-6.
    let nm = NelderMead { max_iter: 20_000, f_tol: 1e-8, x_tol: 1e-8 };
    let best = match start {
        Some(f) => {
            let x0 = [f.amplitude * f.phase_offset.cos(), f.amplitude * f.phase_offset.sin(), f.offset, f.asymmetry];
            let shrink = 0.999 / ((x0[0] * x0[0] + x0[1] * x0[1]).sqrt() + x0[2].abs()).max(0.999);
            let x0 = [x0[0] * shrink, x0[1] * shrink, x0[2] * shrink, x0[3].clamp(1e-3, 1.0 - 1e-3)];
            let near = nm.minimize(nll, &x0, &[0.004, 0.004, 0.002, 0.004]);
            nm.minimize(nll, &near.x, &[5e-4, 5e-4, 2e-4, 5e-4])
        }
        None => {
            let x0 = least_squares_start(&data, groups, pmfs);
            let first = nm.minimize(nll, &x0, &[0.05, 0.05, 0.02, 0.05]);
            let second = nm.minimize(nll, &first.x, &[0.005, 0.005, 0.002, 0.005]);
            nm.minimize(nll, &second.x, &[5e-4, 5e-4, 2e-4, 5e-4])
        }
    };
    if !best.value.is_finite() || !best.converged {
        return Err(Error::EstimationFailed("parity oscillation fit did not converge".into()));
    }
    let (a, b) = (best.x[0], best.x[1]);
    Ok(ParityFit {
        amplitude: (a * a + b * b).sqrt().min(1.0),
        phase_offset: b.atan2(a),
        offset: best.x[2],
        asymmetry: best.x[3],
        log_likelihood: -best.value,
    })
}

/// Least-squares sinusoid through thresholded parities, pulled inside the
/// physical region.
fn least_squares_start(data: &[PhaseRows], groups: &[(f64, CountHistogram)], pmfs: &ReferencePmfs) -> [f64; 4] {
    let (mut sy, mut ss, mut sc, mut ssc, mut sss, mut scc, mut sys, mut syc, mut even, mut bright) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let n = groups.len() as f64;
    for (d, (_, h)) in data.iter().zip(groups) {
        let f = threshold_fractions(h, pmfs);
        let y = f[0] + f[2] - f[1];
        sy += y;
        ss += d.s;
        sc += d.c;
        ssc += d.s * d.c;
        sss += d.s * d.s;
        scc += d.c * d.c;
        sys += y * d.s;
        syc += y * d.c;
        even += f[0] + f[2];
        bright += f[2];
    }
    let normal = nalgebra::Matrix3::new(n, ss, sc, ss, sss, ssc, sc, ssc, scc);
    let rhs = nalgebra::Vector3::new(sy, sys, syc);
    let sol = normal.lu().solve(&rhs).unwrap_or(nalgebra::Vector3::new(0.0, 0.0, 0.0));
    let (mut c0, mut a0, mut b0) = (sol[0], sol[1], sol[2]);
    let reach = (a0 * a0 + b0 * b0).sqrt() + c0.abs();
    if reach > 0.95 {
        let s = 0.95 / reach;
        c0 *= s;
        a0 *= s;
        b0 *= s;
    }
    let w0 = if even > 0.0 { (bright / even).clamp(0.02, 0.98) } else { 0.5 };

    [a0, b0, c0, w0]
}

/// `F_m = (P0 + P2)/2 + A/2`.
pub fn bell_fidelity_parity(p0: f64, p2: f64, amplitude: f64) -> f64 {
    0.5 * (p0 + p2) + 0.5 * amplitude
}

/// `F_m = P1/2 − Π̄/2`.
pub fn antisym_fidelity(p1: f64, mean_parity: f64) -> f64 {
    0.5 * p1 - 0.5 * mean_parity
}

/// Checks that `phases` cover the six multiples of π/3 and nothing else.
pub fn check_antisymmetric_grid(phases: &[f64]) -> Result<()> {
    let step = PI / 3.0;
    let mut seen = [false; 6];
    for &p in phases {
        let k = p.rem_euclid(2.0 * PI) / step;
        let r = k.round();
        if (k - r).abs() > 1e-6 {
            return Err(Error::EstimationFailed(format!("analysis phase {p} is not a multiple of π/3")));
        }
        seen[(r as usize) % 6] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::EstimationFailed("antisymmetric analysis needs all six multiples of π/3".into()));
    }
    Ok(())
}

/// Intermediate quantities of a parity-method analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityAnalysis {
    pub populations: Populations,
    /// Oscillation fit for |Φ⟩ data.
    pub fit: Option<ParityFit>,
    /// Phase-averaged parity for |Ψ₋⟩ data.
    pub mean_parity: Option<f64>,
    pub measured_fidelity: f64,
    /// Fidelity after the leakage correction.
    pub fidelity: f64,
}

/// Parity-method fidelity of a dataset, corrected for leakage `eps`.
pub fn parity_method(dataset: &Dataset, pmfs: &ReferencePmfs, eps: f64) -> Result<ParityAnalysis> {
    parity_method_from(dataset, pmfs, eps, None)
}

/// As [`parity_method`], starting the oscillation fit near `start`.
pub fn parity_method_from(dataset: &Dataset, pmfs: &ReferencePmfs, eps: f64, start: Option<&ParityFit>) -> Result<ParityAnalysis> {
    if dataset.population.is_empty() {
        return Err(Error::EstimationFailed("dataset has no population data".into()));
    }
    if dataset.parity.is_empty() {
        return Err(Error::EstimationFailed("dataset has no parity data".into()));
    }
    let populations = ml_populations_with(&pool(&dataset.population)?, pmfs)?;
    let groups = dataset.parity_by_phase()?;
    let (fit, mean_parity, f_m) = match dataset.target {
        TargetState::Symmetric => {
            let fit = fit_parity_oscillation_from(&groups, pmfs, start)?;
            let f_m = bell_fidelity_parity(populations.p0, populations.p2, fit.amplitude);
            (Some(fit), None, f_m)
        }
        TargetState::Antisymmetric => {
            check_antisymmetric_grid(&groups.iter().map(|(p, _)| *p).collect::<Vec<_>>())?;
            let mut sum = 0.0;
            for (_, h) in &groups {
                sum += ml_populations_with(h, pmfs)?.parity();
            }
            let mean = sum / groups.len() as f64;
            (None, Some(mean), antisym_fidelity(populations.p1, mean))
        }
    };
    let fidelity = correct_leakage(f_m, eps, dataset.target)?;
    Ok(ParityAnalysis { populations, fit, mean_parity, measured_fidelity: f_m, fidelity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{reference_pmfs, synthesize_with_pmfs, Analysis, Context, ReferenceModel};
    use crate::hilbert::{cr, embed_qubit_pair, phi_bell, psi_minus_bell, CMat};

    fn proj(v: &crate::hilbert::CVec) -> CMat {
        v * v.adjoint()
    }

    fn groups(rho: &CMat, pmfs: &ReferencePmfs, n: u64, seed: u64) -> Vec<(f64, CountHistogram)> {
        (0..26)
            .map(|k| {
                let phase = PI * k as f64 / 26.0;
                (phase, synthesize_with_pmfs(rho, pmfs, Analysis::Pi2 { phase }, n, seed + k))
            })
            .collect()
    }

    #[test]
    fn formula_examples() {
        assert_eq!(bell_fidelity_parity(0.5, 0.5, 1.0), 1.0);
        assert_eq!(bell_fidelity_parity(0.5, 0.5, 0.0), 0.5);
        assert_eq!(antisym_fidelity(1.0, -1.0), 1.0);
        assert_eq!(antisym_fidelity(0.0, 0.0), 0.0);
        assert!(check_antisymmetric_grid(&[0.0, 1.0, 2.0, 3.0]).is_err());
        assert!(check_antisymmetric_grid(&(0..6).map(|k| k as f64 * PI / 3.0).collect::<Vec<_>>()).is_ok());
    }

    #[test]
    fn amplitudes_of_reference_states() {
        let pmfs = reference_pmfs(&ReferenceModel::default());
        let fit = fit_parity_oscillation(&groups(&proj(&phi_bell()), &pmfs, 2000, 10), &pmfs).unwrap();
        assert!(fit.amplitude > 0.99, "{fit:?}");

        // Half Bell state, half maximally mixed qubits.
        let mixed = proj(&phi_bell()) * cr(0.5) + embed_qubit_pair(&(CMat::identity(4, 4) * cr(0.125)));
        let fit = fit_parity_oscillation(&groups(&mixed, &pmfs, 4000, 20), &pmfs).unwrap();
        assert!((fit.amplitude - 0.5).abs() < 0.02, "{fit:?}");

        let fit = fit_parity_oscillation(&groups(&proj(&psi_minus_bell()), &pmfs, 2000, 30), &pmfs).unwrap();
        assert!(fit.amplitude < 0.02 && fit.offset < -0.98, "{fit:?}");
    }

    #[test]
    fn ideal_readout_matches_least_squares() {
        // Two perfectly separated outcomes; histograms hold exact expected frequencies.
        let m = ReferenceModel { lambda_bright: 400.0, lambda_dark: 0.0, repump_rate: 0.0, depump_rate: 0.0, leak_prob: 0.0 };
        let pmfs = reference_pmfs(&m);
        let n = 1_000_000u64;
        let (amp, off) = (0.83, 0.4);
        let phases: Vec<f64> = (0..8).map(|k| PI * k as f64 / 8.0).collect();
        let data: Vec<(f64, CountHistogram)> = phases
            .iter()
            .map(|&ph| {
                let par = amp * (2.0 * ph + off).sin();
                let p1 = 0.5 * (1.0 - par);
                let mut bins = vec![0u64; pmfs.n_bins()];
                let odd = (p1 * n as f64).round() as u64;
                bins[0] = (n - odd) / 2;
                bins[400] = odd;
                bins[800] = n - odd - bins[0];
                (ph, CountHistogram::new(Context::Parity, Some(ph * 1e3), bins))
            })
            .collect();
        // Least-squares amplitude of the recorded parities.
        let (mut s, mut c) = (0.0, 0.0);
        for (ph, h) in &data {
            let y = (h.bins[0] + h.bins[800]) as f64 / n as f64 - h.bins[400] as f64 / n as f64;
            s += y * (2.0 * ph).sin();
            c += y * (2.0 * ph).cos();
        }
        let ls = 2.0 * (s * s + c * c).sqrt() / phases.len() as f64;
        let fit = fit_parity_oscillation(&data, &pmfs).unwrap();
        assert!((fit.amplitude - ls).abs() < 1e-6, "{} vs {ls}", fit.amplitude);
    }

    #[test]
    fn too_few_phases() {
        let pmfs = reference_pmfs(&ReferenceModel::default());
        let g: Vec<_> = groups(&proj(&phi_bell()), &pmfs, 100, 1).into_iter().take(3).collect();
        assert!(matches!(fit_parity_oscillation(&g, &pmfs), Err(Error::EstimationFailed(_))));
    }
}
