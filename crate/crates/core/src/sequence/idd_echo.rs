//! Spin-echo coherence of a single qubit with and without intrinsic
//! dynamical decoupling (IDD).
//!
//! The qubit sees `H = (β(t)/2)σ_z + 2Ω_μ cos(δt) σ_x`. In the frame of the
//! bichromatic drive the noise term becomes
//! `(β/2)(cos θ(t) σ_z + sin θ(t) σ_y)` with `θ(t) = (4Ω_μ/δ) sin δt`,
//! whose time average carries the factor `J₀(4Ω_μ/δ)`. Both echo arms last
//! an integer number of drive periods so the two frames coincide at the
//! pulses.
//!
//! Noise is a sum of Ornstein–Uhlenbeck processes spanning several decades
//! of correlation time (a 1/f-like spectrum) plus a white floor. The slow
//! part is frozen within each drive period and its exact one-period
//! propagator is tabulated on a grid of β; white noise enters as a Gaussian
//! rotation per period.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::params::idd_amplitude;
use crate::{rng, Error, Result, TWO_PI};

/// One Ornstein–Uhlenbeck component of the qubit-frequency noise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuComponent {
    /// Stationary standard deviation, rad/s.
    pub sigma: f64,
    /// Correlation time, s.
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DephasingNoiseModel {
    pub components: Vec<OuComponent>,
    /// White-noise dephasing rate: free coherence decays as `e^{−γt}`.
    pub white_rate: f64,
}

impl DephasingNoiseModel {
    pub fn none() -> Self {
        DephasingNoiseModel { components: Vec::new(), white_rate: 0.0 }
    }

    /// Equal-variance OU components with correlation times spaced by factors
    /// of four from `tau_min`; the summed spectrum falls off roughly as 1/f
    /// between the corner frequencies.
    pub fn one_over_f(sigma_each: f64, tau_min: f64, count: usize, white_rate: f64) -> Self {
        let components = (0..count).map(|k| OuComponent { sigma: sigma_each, tau: tau_min * 4f64.powi(k as i32) }).collect();
        DephasingNoiseModel { components, white_rate }
    }

    /// Default model: spin-echo coherence of a few hundred μs without IDD.
    pub fn laboratory() -> Self {
        Self::one_over_f(TWO_PI * 1.2e3, 10e-6, 6, 150.0)
    }

    pub fn is_silent(&self) -> bool {
        self.white_rate == 0.0 && self.components.iter().all(|c| c.sigma == 0.0)
    }

    fn total_sigma(&self) -> f64 {
        self.components.iter().map(|c| c.sigma * c.sigma).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IddEchoConfig {
    /// Detuning δ of the bichromatic tones (rad/s).
    pub delta: f64,
    /// IDD branch used when the drive is on.
    pub branch: usize,
    pub noise: DephasingNoiseModel,
    pub trajectories: usize,
    pub seed: u64,
}

impl Default for IddEchoConfig {
    fn default() -> Self {
        IddEchoConfig { delta: TWO_PI * 0.95e6, branch: 1, noise: DephasingNoiseModel::laboratory(), trajectories: 96, seed: 0 }
    }
}

/// SU(2) element `w·I − i(x σ_x + y σ_y + z σ_z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Su2 {
    w: f64,
    v: [f64; 3],
}

impl Su2 {
    const ID: Su2 = Su2 { w: 1.0, v: [0.0; 3] };

    /// `exp(−i r·σ)`.
    fn exp(r: [f64; 3]) -> Su2 {
        let a = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if a < 1e-300 {
            return Su2::ID;
        }
        let s = a.sin() / a;
        Su2 { w: a.cos(), v: [r[0] * s, r[1] * s, r[2] * s] }
    }

    /// Rotation by `theta` about the equatorial axis at `phase`.
    fn rotation(theta: f64, phase: f64) -> Su2 {
        let h = 0.5 * theta;
        Su2::exp([h * phase.cos(), h * phase.sin(), 0.0])
    }

    /// `self · other`.
    fn mul(self, o: Su2) -> Su2 {
        let (a, b) = (self.v, o.v);
        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        Su2 {
            w: self.w * o.w - (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]),
            v: [self.w * b[0] + o.w * a[0] + cross[0], self.w * b[1] + o.w * a[1] + cross[1], self.w * b[2] + o.w * a[2] + cross[2]],
        }
    }

    /// Generator `r` with `self = exp(−i r·σ)`.
    fn log(self) -> [f64; 3] {
        let s = (self.v[0] * self.v[0] + self.v[1] * self.v[1] + self.v[2] * self.v[2]).sqrt();
        if s < 1e-300 {
            return [0.0; 3];
        }
        let a = s.atan2(self.w);
        [self.v[0] * a / s, self.v[1] * a / s, self.v[2] * a / s]
    }

    /// `⟨σ_z⟩` after acting on |↓⟩ (the `σ_z = +1` state).
    fn sigma_z_from_down(self) -> f64 {
        self.w * self.w + self.v[2] * self.v[2] - self.v[0] * self.v[0] - self.v[1] * self.v[1]
    }
}

/// Per-period propagators of the driven qubit, tabulated against the slow noise value.
struct PeriodTable {
    beta_min: f64,
    step: f64,
    generators: Vec<[f64; 3]>,
    /// Cholesky factor of the white-noise rotation covariance per period (z, y).
    white_chol: [[f64; 2]; 2],
}

impl PeriodTable {
    fn new(delta: f64, drive_arg: f64, beta_max: f64, white_rate: f64) -> Self {
        let period = TWO_PI / delta;
        let fine = 2000;
        let h = period / fine as f64;
        let points = 401;
        let beta_min = -beta_max;
        let step = if beta_max > 0.0 { 2.0 * beta_max / (points - 1) as f64 } else { 1.0 };
        let theta = |t: f64| drive_arg * (delta * t).sin();
        let generators = (0..points)
            .map(|k| {
                let beta = beta_min + k as f64 * step;
                let mut u = Su2::ID;
                for j in 0..fine {
                    let tm = (j as f64 + 0.5) * h;
                    let th = theta(tm);
                    let r = [0.0, 0.5 * beta * th.sin() * h, 0.5 * beta * th.cos() * h];
                    u = Su2::exp(r).mul(u);
                }
                u.log()
            })
            .collect();
        // White noise ξ with ⟨ξ(t)ξ(t')⟩ = 2γ δ(t − t') gives rotation vector
        // (1/2)∫ξ (cos θ, sin θ) dt per period.
        let (mut czz, mut cyy, mut czy) = (0.0, 0.0, 0.0);
        for j in 0..fine {
            let th = theta((j as f64 + 0.5) * h);
            czz += th.cos().powi(2) * h;
            cyy += th.sin().powi(2) * h;
            czy += th.cos() * th.sin() * h;
        }
        let scale = 0.25 * 2.0 * white_rate;
        let (a, b, c) = (czz * scale, czy * scale, cyy * scale);
        let l00 = a.sqrt();
        let l10 = if l00 > 0.0 { b / l00 } else { 0.0 };
        let l11 = (c - l10 * l10).max(0.0).sqrt();
        PeriodTable { beta_min, step, generators, white_chol: [[l00, 0.0], [l10, l11]] }
    }

    fn generator(&self, beta: f64) -> [f64; 3] {
        let x = ((beta - self.beta_min) / self.step).clamp(0.0, (self.generators.len() - 1) as f64);
        let i = (x.floor() as usize).min(self.generators.len() - 2);
        let f = x - i as f64;
        let (a, b) = (self.generators[i], self.generators[i + 1]);
        [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]), a[2] + f * (b[2] - a[2])]
    }

    fn white_kick<R: Rng>(&self, r: &mut R) -> [f64; 3] {
        let (n1, n2): (f64, f64) = (r.sample(StandardNormal), r.sample(StandardNormal));
        let z = self.white_chol[0][0] * n1;
        let y = self.white_chol[1][0] * n1 + self.white_chol[1][1] * n2;
        [0.0, y, z]
    }
}

fn build_table(cfg: &IddEchoConfig, idd_on: bool) -> Result<PeriodTable> {
    if !(cfg.delta > 0.0) {
        return Err(Error::InvalidParameter("drive detuning must be positive".into()));
    }
    let arg = if idd_on { 4.0 * idd_amplitude(cfg.delta, cfg.branch)? / cfg.delta } else { 0.0 };
    let beta_max = 8.0 * cfg.noise.total_sigma();
    Ok(PeriodTable::new(cfg.delta, arg, beta_max, cfg.noise.white_rate))
}

/// One noisy echo sequence; returns `⟨σ_z⟩` at the end.
fn echo_trajectory(cfg: &IddEchoConfig, table: &PeriodTable, periods_per_arm: usize, stream: u64) -> f64 {
    let mut r = rng::stream(cfg.seed, stream);
    let period = TWO_PI / cfg.delta;
    let mut x: Vec<f64> = cfg.noise.components.iter().map(|c| c.sigma * r.sample::<f64, _>(StandardNormal)).collect();
    let decay: Vec<(f64, f64)> = cfg
        .noise
        .components
        .iter()
        .map(|c| {
            let e = (-period / c.tau).exp();
            (e, c.sigma * (1.0 - e * e).sqrt())
        })
        .collect();
    let white = cfg.noise.white_rate > 0.0;
    let mut u = Su2::rotation(std::f64::consts::FRAC_PI_2, 0.0);
    for arm in 0..2 {
        if arm == 1 {
            u = Su2::rotation(std::f64::consts::PI, 0.0).mul(u);
        }
        for _ in 0..periods_per_arm {
            let beta: f64 = x.iter().sum();
            let mut step = Su2::exp(table.generator(beta));
            if white {
                step = Su2::exp(table.white_kick(&mut r)).mul(step);
            }
            u = step.mul(u);
            for (xi, &(e, s)) in x.iter_mut().zip(&decay) {
                *xi = *xi * e + s * r.sample::<f64, _>(StandardNormal);
            }
        }
    }
    u = Su2::rotation(std::f64::consts::FRAC_PI_2, 0.0).mul(u);
    // The noiseless sequence is a 2π rotation, returning the qubit to |↓⟩.
    u.sigma_z_from_down()
}

/// Echo contrast after total free-evolution time `duration` (both arms).
pub fn echo_contrast(cfg: &IddEchoConfig, duration: f64, idd_on: bool) -> Result<f64> {
    Ok(coherence_scan(cfg, &[duration], idd_on)?[0])
}

/// Echo contrasts for several durations; trajectories run in parallel with
/// per-(duration, trajectory) seeds.
pub fn coherence_scan(cfg: &IddEchoConfig, durations: &[f64], idd_on: bool) -> Result<Vec<f64>> {
    if cfg.trajectories == 0 {
        return Err(Error::InvalidParameter("need at least one trajectory".into()));
    }
    if durations.iter().any(|&d| !(d >= 0.0)) {
        return Err(Error::InvalidParameter("durations must be non-negative".into()));
    }
    let table = build_table(cfg, idd_on)?;
    let period = TWO_PI / cfg.delta;
    durations
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let per_arm = (0.5 * d / period).round() as usize;
            let values: Vec<f64> = (0..cfg.trajectories)
                .into_par_iter()
                .map(|k| echo_trajectory(cfg, &table, per_arm, ((i as u64) << 32) | k as u64))
                .collect();
            Ok(values.iter().sum::<f64>() / cfg.trajectories as f64)
        })
        .collect()
}

/// Spin-echo contrast for one duration with the default configuration and
/// the given noise model.
pub fn idd_echo_experiment(duration: f64, idd_on: bool, noise: &DephasingNoiseModel) -> Result<f64> {
    let cfg = IddEchoConfig { noise: noise.clone(), ..Default::default() };
    echo_contrast(&cfg, duration, idd_on)
}

/// Stretched-exponential fit `C(T) = exp(−(T/T₂)ⁿ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceFit {
    pub coherence_time: f64,
    pub exponent: f64,
    pub points_used: usize,
}

/// Linear regression of `ln(−ln C)` on `ln T` over points with `0.03 < C < 0.97`.
pub fn fit_coherence_time(durations: &[f64], contrasts: &[f64]) -> Result<CoherenceFit> {
    if durations.len() != contrasts.len() {
        return Err(Error::DimensionMismatch { expected: durations.len(), got: contrasts.len() });
    }
    let pts: Vec<(f64, f64)> = durations
        .iter()
        .zip(contrasts)
        .filter(|(&t, &c)| t > 0.0 && c > 0.03 && c < 0.97)
        .map(|(&t, &c)| (t.ln(), (-c.ln()).ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::EstimationFailed("fewer than two contrasts inside the fit window".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::EstimationFailed("fit points share one duration".into()));
    }
    let slope = sxy / sxx;
    if slope <= 0.0 {
        return Err(Error::EstimationFailed("contrast does not decay over the scan".into()));
    }
    let intercept = my - slope * mx;
    Ok(CoherenceFit { coherence_time: (-intercept / slope).exp(), exponent: slope, points_used: pts.len() })
}

/// Logarithmically spaced durations.
pub fn log_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![start];
    }
    let (a, b) = (start.ln(), stop.ln());
    (0..count).map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn su2_algebra() {
        let a = Su2::rotation(0.3, 0.7);
        let b = Su2::rotation(1.1, -0.2);
        let ab = a.mul(b);
        assert!((ab.w * ab.w + ab.v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
        let r = [0.1, -0.2, 0.3];
        let back = Su2::exp(r).log();
        for k in 0..3 {
            assert!((back[k] - r[k]).abs() < 1e-14);
        }
        // Two π/2 pulses and one π pulse about x compose to −I.
        let s = Su2::rotation(std::f64::consts::FRAC_PI_2, 0.0);
        let full = s.mul(Su2::rotation(std::f64::consts::PI, 0.0)).mul(s);
        assert!((full.w + 1.0).abs() < 1e-14);
    }

    #[test]
    fn silent_noise_keeps_full_contrast() {
        let cfg = IddEchoConfig { noise: DephasingNoiseModel::none(), trajectories: 4, ..Default::default() };
        for on in [false, true] {
            let c = echo_contrast(&cfg, 200e-6, on).unwrap();
            assert!((c - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn idd_removes_static_frequency_offset_to_first_order() {
        // A frozen offset over one period: with the drive at the IDD point the
        // σ_z part of the period generator vanishes.
        let cfg = IddEchoConfig { noise: DephasingNoiseModel::one_over_f(1e3, 1.0, 1, 0.0), ..Default::default() };
        let table = build_table(&cfg, true).unwrap();
        let g = table.generator(500.0);
        let period = TWO_PI / cfg.delta;
        assert!(g[2].abs() < 1e-6 * 0.5 * 500.0 * period, "z generator {}", g[2]);
        let off = build_table(&cfg, false).unwrap().generator(500.0);
        assert!((off[2] - 0.5 * 500.0 * period).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_known_decay() {
        let t = log_grid(1e-4, 1e-2, 12);
        let c: Vec<f64> = t.iter().map(|&x| (-(x / 1e-3f64).powf(1.7)).exp()).collect();
        let fit = fit_coherence_time(&t, &c).unwrap();
        assert!((fit.coherence_time - 1e-3).abs() < 1e-12);
        assert!((fit.exponent - 1.7).abs() < 1e-10);
    }
}
