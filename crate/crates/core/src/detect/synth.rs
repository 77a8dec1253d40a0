//! Synthetic count data.
//!
//! Trial `i` of a histogram with seed `s` is drawn by inverting the outcome
//! CDF at `counter_uniform(s, i)`, so any trial can be generated on its own
//! and a histogram does not depend on how trials are partitioned.

use super::histogram::{Context, CountHistogram};
use super::model::{reference_pmfs, ReferenceModel, ReferencePmfs};
use super::povm::{bright_projectors, Analysis};
use crate::hilbert::{check_density, CMat};
use crate::rng::counter_uniform;
use crate::Result;

/// Draws `n_trials` detections from the distribution `pmf`.
pub fn sample_pmf(pmf: &[f64], n_trials: u64, seed: u64) -> Vec<u64> {
    let mut cum = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for &p in pmf {
        acc += p;
        cum.push(acc);
    }
    let total = acc;
    let mut bins = vec![0u64; pmf.len()];
    for i in 0..n_trials {
        let u = counter_uniform(seed, i) * total;
        let k = cum.partition_point(|&c| c <= u).min(pmf.len() - 1);
        bins[k] += 1;
    }
    bins
}

/// Histogram of `n_trials` detections of `rho` after `analysis`.
pub fn synthesize_counts(rho: &CMat, model: &ReferenceModel, analysis: Analysis, n_trials: u64, seed: u64) -> Result<CountHistogram> {
    check_density(rho, 1e-8, 1e-8)?;
    model.validate()?;
    Ok(synthesize_with_pmfs(rho, &reference_pmfs(model), analysis, n_trials, seed))
}

/// As [`synthesize_counts`] with precomputed distributions.
pub fn synthesize_with_pmfs(rho: &CMat, pmfs: &ReferencePmfs, analysis: Analysis, n_trials: u64, seed: u64) -> CountHistogram {
    let e = bright_projectors(analysis);
    let w = |b: usize| (&e[b] * rho).trace().re.max(0.0);
    let pmf = pmfs.mixture([w(0), w(1), w(2)]);
    let bins = sample_pmf(&pmf, n_trials, seed);
    match analysis {
        Analysis::None => CountHistogram::new(Context::Population, None, bins),
        Analysis::Pi2 { phase } => CountHistogram::new(Context::Parity, Some(phase * 1e3), bins),
    }
}

/// Bright (|↓↓⟩ with leakage) and dark (after a π pulse) reference histograms.
pub fn synthesize_reference(model: &ReferenceModel, n_trials: u64, seed: u64) -> Result<(CountHistogram, CountHistogram)> {
    model.validate()?;
    let pmfs = reference_pmfs(model);
    let bright = sample_pmf(&pmfs.bright_reference(model.leak_prob), n_trials, crate::rng::derive(seed, 0));
    let dark = sample_pmf(&pmfs.dark_reference(), n_trials, crate::rng::derive(seed, 1));
    Ok((CountHistogram::new(Context::ReferenceBright, None, bright), CountHistogram::new(Context::ReferenceDark, None, dark)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::povm::build_povm;
    use crate::hilbert::{basis_ket, global_rotation, phi_bell, Level};
    use rand::Rng;
    use rand_distr::{Distribution, Poisson};

    fn proj(v: &crate::hilbert::CVec) -> CMat {
        v * v.adjoint()
    }

    #[test]
    fn reproducible_and_poisson_for_bright_pair() {
        let m = ReferenceModel { lambda_dark: 0.0, repump_rate: 0.0, depump_rate: 0.0, ..Default::default() };
        let rho = proj(&basis_ket(Level::Down, Level::Down));
        let a = synthesize_counts(&rho, &m, Analysis::None, 50_000, 9).unwrap();
        let b = synthesize_counts(&rho, &m, Analysis::None, 50_000, 9).unwrap();
        assert_eq!(a, b);
        let mean = a.mean();
        let se = (60.0f64 / 50_000.0).sqrt();
        assert!((mean - 60.0).abs() < 4.0 * se, "{mean}");
    }

    #[test]
    fn povm_matches_physical_sampling() {
        // Independent oracle: pick a basis outcome after the rotation, then
        // simulate each ion's counts with an explicit switch time.
        let m = ReferenceModel { repump_rate: 0.02, depump_rate: 0.03, ..Default::default() };
        let analysis = Analysis::Pi2 { phase: 0.4 };
        let psi = global_rotation(0.9, 1.3) * phi_bell();
        let rho = proj(&psi);
        let probs = build_povm(&m, analysis).outcome_probabilities(&rho);

        let rotated = analysis.rotation() * &psi;
        let shots = 100_000;
        let mut rng = crate::rng::stream(5, 5);
        let mut freq = vec![0u64; probs.len()];
        for _ in 0..shots {
            let mut u: f64 = rng.random();
            let mut s = 8;
            for (k, a) in rotated.iter().enumerate() {
                u -= a.norm_sqr();
                if u < 0.0 {
                    s = k;
                    break;
                }
            }
            let (l1, l2) = crate::hilbert::spin_levels(s);
            let mut total = 0.0;
            for l in [l1, l2] {
                let (start, end, p) = if l.is_bright() {
                    (m.lambda_bright, m.lambda_dark, m.depump_rate)
                } else {
                    (m.lambda_dark, m.lambda_bright, m.repump_rate)
                };
                let mu = if rng.random::<f64>() < p {
                    let t: f64 = rng.random();
                    start * t + end * (1.0 - t)
                } else {
                    start
                };
                total += if mu > 0.0 { Poisson::new(mu).unwrap().sample(&mut rng) } else { 0.0 };
            }
            freq[(total as usize).min(probs.len() - 1)] += 1;
        }
        for (k, (&f, &p)) in freq.iter().zip(&probs).enumerate() {
            let se = (p * (1.0 - p) / shots as f64).sqrt().max(1.0 / shots as f64);
            assert!((f as f64 / shots as f64 - p).abs() < 4.5 * se, "bin {k}: {} vs {p}", f as f64 / shots as f64);
        }
    }

    #[test]
    fn reference_histograms_have_context() {
        let (b, d) = synthesize_reference(&ReferenceModel::default(), 2000, 1).unwrap();
        assert_eq!(b.context, Context::ReferenceBright);
        assert_eq!(d.context, Context::ReferenceDark);
        assert!(b.mean() > 50.0 && d.mean() < 5.0);
    }
}
