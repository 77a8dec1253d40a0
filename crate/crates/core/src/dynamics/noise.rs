//! Noise sources acting during the gate and the motional Lindblad channels.
//!
//! Rate conventions:
//! * motional dephasing uses the collapse operator `√γ·a†a` with `γ = 2/τ_m`,
//!   so the coherence of `|0⟩ + |1⟩` decays as `e^{−t/τ_m}`;
//! * heating uses `√Γ·a†` and `√Γ·a` together, giving `d⟨n⟩/dt = Γ`;
//! * the motional frequency residual is a quasi-static shift of the mode
//!   frequency, drawn once per trajectory.

use serde::{Deserialize, Serialize};

use crate::hilbert::{annihilation, c, cr, spin_levels, CMat, HilbertSpec, QuantumState, C64, SPIN_DIM};
use crate::{Error, Result, TWO_PI};

/// Normal distribution of the residual motional-frequency error, in Hz.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrequencyResidual {
    pub mean_hz: f64,
    pub std_hz: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Motional coherence time τ_m in seconds; `None` disables motional dephasing.
    pub motional_coherence_time: Option<f64>,
    /// Heating rate in quanta per second.
    pub heating_rate: f64,
    /// Static qubit-frequency offset ε in rad/s, entering as `(ε/2)(σ_z1 + σ_z2)`.
    pub qubit_detuning: f64,
    pub motional_freq_residual: FrequencyResidual,
    /// Thermal occupation of the mode at the start of the gate.
    pub initial_nbar: f64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec::default()
    }

    pub fn motional_dephasing(tau: f64) -> Self {
        NoiseSpec { motional_coherence_time: Some(tau), ..Default::default() }
    }

    pub fn heating(rate: f64) -> Self {
        NoiseSpec { heating_rate: rate, ..Default::default() }
    }

    pub fn frequency_residual(mean_hz: f64, std_hz: f64) -> Self {
        NoiseSpec { motional_freq_residual: FrequencyResidual { mean_hz, std_hz }, ..Default::default() }
    }

    pub fn qubit_offset(eps: f64) -> Self {
        NoiseSpec { qubit_detuning: eps, ..Default::default() }
    }

    /// The three motional error sources analysed for the experiment.
    pub fn experimental() -> Self {
        NoiseSpec {
            motional_coherence_time: Some(64e-3),
            heating_rate: 1.0,
            motional_freq_residual: FrequencyResidual { mean_hz: 3.4, std_hz: 50.0 },
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(tau) = self.motional_coherence_time {
            if !(tau > 0.0) {
                return Err(Error::InvalidParameter(format!("motional coherence time must be positive, got {tau}")));
            }
        }
        let checks = [
            ("heating_rate", self.heating_rate),
            ("motional_freq_residual.std_hz", self.motional_freq_residual.std_hz),
            ("initial_nbar", self.initial_nbar),
        ];
        for (name, v) in checks {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !self.qubit_detuning.is_finite() || !self.motional_freq_residual.mean_hz.is_finite() {
            return Err(Error::InvalidParameter("noise parameters must be finite".into()));
        }
        Ok(())
    }

    /// Dephasing rate `γ = 2/τ_m` of the collapse operator `√γ·a†a`.
    pub fn dephasing_rate(&self) -> f64 {
        self.motional_coherence_time.map_or(0.0, |tau| 2.0 / tau)
    }

    pub fn has_dissipation(&self) -> bool {
        self.dephasing_rate() > 0.0 || self.heating_rate > 0.0
    }

    pub fn has_frequency_noise(&self) -> bool {
        self.motional_freq_residual.mean_hz != 0.0 || self.motional_freq_residual.std_hz != 0.0
    }
}

/// Lindblad dissipator of the motional mode, applied to individual N×N blocks.
#[derive(Clone, Debug)]
pub struct MotionalDissipator {
    n: usize,
    gamma_phi: f64,
    heating: f64,
    /// `(a a† + a† a)/2`, the anticommutator weight of both heating operators.
    half_sum: CMat,
}

impl MotionalDissipator {
    pub fn new(n: usize, spec: &NoiseSpec) -> Self {
        let a = annihilation(n);
        let ad = a.adjoint();
        let half_sum = (&a * &ad + &ad * &a) * cr(0.5);
        MotionalDissipator { n, gamma_phi: spec.dephasing_rate(), heating: spec.heating_rate, half_sum }
    }

    pub fn is_trivial(&self) -> bool {
        self.gamma_phi == 0.0 && self.heating == 0.0
    }

    /// Evolves one block `X` for time `t` under dephasing then heating.
    pub fn apply(&self, x: &mut CMat, t: f64) {
        if t <= 0.0 {
            return;
        }
        if self.gamma_phi > 0.0 {
            let decay: Vec<f64> = (0..self.n).map(|d| (-0.5 * self.gamma_phi * (d * d) as f64 * t).exp()).collect();
            for col in 0..self.n {
                for row in 0..self.n {
                    x[(row, col)] *= decay[row.abs_diff(col)];
                }
            }
        }
        if self.heating > 0.0 {
            // RK4 on the heating generator; Γ·N·h ≤ 1e-3 keeps it well converged.
            let rate = self.heating * self.n as f64;
            let sub = ((rate * t) / 1e-3).ceil().max(1.0) as usize;
            let h = t / sub as f64;
            for _ in 0..sub {
                let k1 = self.heating_rhs(x);
                let k2 = self.heating_rhs(&(&*x + &k1 * cr(0.5 * h)));
                let k3 = self.heating_rhs(&(&*x + &k2 * cr(0.5 * h)));
                let k4 = self.heating_rhs(&(&*x + &k3 * cr(h)));
                *x += (k1 + k2 * cr(2.0) + k3 * cr(2.0) + k4) * cr(h / 6.0);
            }
        }
    }

    /// `Γ(a†Xa + aXa† − {(aa† + a†a)/2, X})`, using the banded structure of `a`.
    fn heating_rhs(&self, x: &CMat) -> CMat {
        let n = self.n;
        let sq: Vec<f64> = (0..n).map(|k| (k as f64).sqrt()).collect();
        let diag: Vec<f64> = (0..n).map(|k| self.half_sum[(k, k)].re).collect();
        CMat::from_fn(n, n, |r, c| {
            let mut v = -x[(r, c)] * (diag[r] + diag[c]);
            if r > 0 && c > 0 {
                v += x[(r - 1, c - 1)] * (sq[r] * sq[c]);
            }
            if r + 1 < n && c + 1 < n {
                v += x[(r + 1, c + 1)] * (sq[r + 1] * sq[c + 1]);
            }
            v * self.heating
        })
    }
}

/// Applies the noise channels alone (no gate drive) for time `t` to a
/// full-space state: motional dephasing and heating, the coherent qubit
/// detuning, and the motional frequency residual averaged over its Gaussian
/// distribution.
pub fn apply_noise_channels(rho: &QuantumState, spec: &NoiseSpec, t: f64) -> Result<QuantumState> {
    if t < 0.0 {
        return Err(Error::InvalidParameter("negative evolution time".into()));
    }
    spec.validate()?;
    let dim = rho.dim();
    if dim % SPIN_DIM != 0 {
        return Err(Error::DimensionMismatch { expected: SPIN_DIM * (dim / SPIN_DIM), got: dim });
    }
    let hs = HilbertSpec::new(dim / SPIN_DIM)?;
    let n = hs.fock_dim;
    let mut m = rho.to_density();
    let diss = MotionalDissipator::new(n, spec);
    let mu = TWO_PI * spec.motional_freq_residual.mean_hz;
    let sigma = TWO_PI * spec.motional_freq_residual.std_hz;
    let z = |s: usize| {
        let (l1, l2) = spin_levels(s);
        0.5 * spec.qubit_detuning * (l1.sigma_z() + l2.sigma_z())
    };
    for s in 0..SPIN_DIM {
        for u in 0..SPIN_DIM {
            let mut block = m.view((s * n, u * n), (n, n)).into_owned();
            if !diss.is_trivial() {
                diss.apply(&mut block, t);
            }
            let spin_phase = C64::from_polar(1.0, -(z(s) - z(u)) * t);
            for col in 0..n {
                for row in 0..n {
                    let d = row as f64 - col as f64;
                    let f = C64::from_polar((-0.5 * sigma * sigma * d * d * t * t).exp(), -mu * d * t);
                    block[(row, col)] *= f * spin_phase;
                }
            }
            m.view_mut((s * n, u * n), (n, n)).copy_from(&block);
        }
    }
    Ok(QuantumState::Density(m))
}

/// Right-hand side of the Lindblad equation on dense matrices.
pub fn lindblad_rhs(h: &CMat, collapse: &[CMat], rho: &CMat) -> CMat {
    let mut out = (h * rho - rho * h) * c(0.0, -1.0);
    for l in collapse {
        let ld = l.adjoint();
        let ldl = &ld * l;
        out += l * rho * &ld - (&ldl * rho + rho * &ldl) * cr(0.5);
    }
    out
}

/// Dense RK4 integration of the Lindblad equation; a reference for the
/// block engine on small dimensions.
pub fn lindblad_rk4<F>(h: F, collapse: &[CMat], rho: &CMat, t0: f64, t1: f64, dt: f64) -> CMat
where
    F: Fn(f64) -> CMat,
{
    let steps = ((t1 - t0) / dt).ceil().max(1.0) as usize;
    let step = (t1 - t0) / steps as f64;
    let pairs: Vec<(CMat, CMat)> = collapse.iter().map(|l| (l.clone(), l.adjoint())).collect();
    let decay = pairs.iter().fold(CMat::zeros(rho.nrows(), rho.ncols()), |acc, (l, ld)| acc + ld * l) * c(0.0, -0.5);
    // With H_eff = H − (i/2)ΣL†L: dρ/dt = −i(H_eff ρ − ρ H_eff†) + Σ LρL†.
    let rhs = |heff: &CMat, heff_dag: &CMat, r: &CMat| -> CMat {
        let mut out = (heff * r - r * heff_dag) * c(0.0, -1.0);
        for (l, ld) in &pairs {
            out += l * r * ld;
        }
        out
    };
    let effective = |t: f64| {
        let m = h(t) + &decay;
        let d = m.adjoint();
        (m, d)
    };
    let mut r = rho.clone();
    for k in 0..steps {
        let t = t0 + k as f64 * step;
        let (h0, h0d) = effective(t);
        let (hm, hmd) = effective(t + 0.5 * step);
        let (h1, h1d) = effective(t + step);
        let k1 = rhs(&h0, &h0d, &r);
        let k2 = rhs(&hm, &hmd, &(&r + &k1 * cr(0.5 * step)));
        let k3 = rhs(&hm, &hmd, &(&r + &k2 * cr(0.5 * step)));
        let k4 = rhs(&h1, &h1d, &(&r + &k3 * cr(step)));
        r += (k1 + k2 * cr(2.0) + k3 * cr(2.0) + k4) * cr(step / 6.0);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_ket, phi_bell, tensor_spin_motion, thermal_motion, CVec, Level};

    #[test]
    fn dephasing_convention() {
        let spec = NoiseSpec::motional_dephasing(64e-3);
        let d = MotionalDissipator::new(3, &spec);
        let mut x = CMat::from_element(3, 3, cr(0.5));
        d.apply(&mut x, 10e-3);
        assert!((x[(0, 1)].re - 0.5 * (-10e-3_f64 / 64e-3).exp()).abs() < 1e-15);
        assert_eq!(x[(1, 1)], cr(0.5));
    }

    #[test]
    fn heating_raises_mean_occupation_linearly() {
        let spec = NoiseSpec::heating(1.0);
        let n = 12;
        let d = MotionalDissipator::new(n, &spec);
        let mut x = thermal_motion(0.0, n);
        d.apply(&mut x, 0.05);
        let mean: f64 = (0..n).map(|k| k as f64 * x[(k, k)].re).sum();
        assert!((mean - 0.05).abs() < 1e-6, "mean {mean}");
        assert!((x.trace().re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn block_dissipator_matches_dense_lindblad() {
        let spec = NoiseSpec { motional_coherence_time: Some(0.3), heating_rate: 2.0, ..Default::default() };
        let n = 5;
        let d = MotionalDissipator::new(n, &spec);
        let mut x = CMat::from_fn(n, n, |i, j| c(1.0 / (1 + i + j) as f64, 0.1 * (i as f64 - j as f64)));
        x = (&x + x.adjoint()) * cr(0.5);
        let a = annihilation(n);
        let ops = [
            (&a.adjoint() * &a) * cr(spec.dephasing_rate().sqrt()),
            a.adjoint() * cr(spec.heating_rate.sqrt()),
            &a * cr(spec.heating_rate.sqrt()),
        ];
        let dense = lindblad_rk4(|_| CMat::zeros(n, n), &ops, &x, 0.0, 0.2, 1e-4);
        d.apply(&mut x, 0.2);
        assert!((x - dense).norm() < 1e-9);
    }

    #[test]
    fn channel_is_completely_positive() {
        // Choi matrix of the motional channel on a 3-level truncation.
        let spec = NoiseSpec { motional_coherence_time: Some(1e-3), heating_rate: 50.0, ..Default::default() };
        let n = 3;
        let d = MotionalDissipator::new(n, &spec);
        let mut choi = CMat::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let mut e = CMat::zeros(n, n);
                e[(i, j)] = cr(1.0);
                d.apply(&mut e, 2e-3);
                for r in 0..n {
                    for s in 0..n {
                        choi[(i * n + r, j * n + s)] = e[(r, s)];
                    }
                }
            }
        }
        let min = choi.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > -1e-9, "min Choi eigenvalue {min}");
    }

    #[test]
    fn zero_noise_leaves_state_unchanged() {
        let hs = HilbertSpec::new(4).unwrap();
        let spin = phi_bell();
        let rho = tensor_spin_motion(&(&spin * spin.adjoint()), &thermal_motion(0.2, 4));
        let out = apply_noise_channels(&QuantumState::Density(rho.clone()), &NoiseSpec::none(), 1e-3).unwrap();
        assert!((out.to_density() - rho).norm() < 1e-15);
        assert_eq!(out.dim(), hs.dim());
    }

    #[test]
    fn qubit_detuning_rotates_coherence() {
        let spin = phi_bell();
        let mut motion = CVec::zeros(2);
        motion[0] = cr(1.0);
        let psi = spin.kronecker(&motion);
        let eps = 1000.0;
        let out = apply_noise_channels(&QuantumState::Ket(psi), &NoiseSpec::qubit_offset(eps), 1e-3).unwrap().to_density();
        let dd = basis_ket(Level::Down, Level::Down).kronecker(&motion);
        let uu = basis_ket(Level::Up, Level::Up).kronecker(&motion);
        let coh = dd.dotc(&(&out * &uu));
        // ⟨↓↓|ρ|↑↑⟩ picks up e^{−i(1−(−1))ε t}.
        let expect = c(0.0, -0.5) * C64::from_polar(1.0, -2.0 * eps * 1e-3);
        assert!((coh - expect).norm() < 1e-14);
        assert!(apply_noise_channels(&QuantumState::Ket(dd), &NoiseSpec::none(), -1.0).is_err());
    }
}
