use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j, j0_zero};
use crate::{Error, Result, TWO_PI};

/// Gradient drive frequency.
pub const OMEGA_G_DEFAULT: f64 = TWO_PI * 5.0e6;
/// Frequency of the out-of-phase axial mode used for the gate.
pub const OMEGA_R_DEFAULT: f64 = TWO_PI * 6.9e6;
/// Closed phase-space loops per gate (one per interaction segment).
pub const LOOPS_DEFAULT: usize = 8;
/// Total gate duration and the part spent with both drives at full strength.
pub const GATE_TIME_DEFAULT: f64 = 740e-6;
pub const INTERACTION_TIME_DEFAULT: f64 = 580e-6;

/// Parameters of the spin-dependent-force interaction.
///
/// All frequencies are angular (rad/s). `delta` is never set directly: the
/// constructor enforces `δ = (ω_r − ω_g)/2 + Δ/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub omega_g: f64,
    pub omega_r: f64,
    pub delta: f64,
    pub big_delta: f64,
    pub big_omega_g: f64,
    pub omega_mu: f64,
}

impl EffectiveParams {
    pub fn new(omega_g: f64, omega_r: f64, big_delta: f64, big_omega_g: f64, omega_mu: f64) -> Result<Self> {
        for (name, v) in
            [("omega_g", omega_g), ("omega_r", omega_r), ("Delta", big_delta), ("Omega_g", big_omega_g), ("Omega_mu", omega_mu)]
        {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if omega_r == omega_g {
            return Err(Error::InvalidParameter("omega_r must differ from omega_g".into()));
        }
        let delta = 0.5 * (omega_r - omega_g) + 0.5 * big_delta;
        if delta <= 0.0 {
            return Err(Error::InvalidParameter(format!("microwave detuning δ = {delta} must be positive")));
        }
        let p = EffectiveParams { omega_g, omega_r, delta, big_delta, big_omega_g, omega_mu };
        if !p.detuning_is_small() {
            log::warn!(
                "gate detuning |Δ| = {:.3e} rad/s is not small against |ω_r − ω_g| = {:.3e} rad/s",
                big_delta.abs(),
                (omega_r - omega_g).abs()
            );
        }
        Ok(p)
    }

    /// Like [`EffectiveParams::new`] but also checks a caller-supplied `δ`.
    pub fn with_delta_check(omega_g: f64, omega_r: f64, delta: f64, big_delta: f64, big_omega_g: f64, omega_mu: f64) -> Result<Self> {
        let p = Self::new(omega_g, omega_r, big_delta, big_omega_g, omega_mu)?;
        if ((p.delta - delta) / p.delta).abs() > 1e-9 {
            return Err(Error::Config(format!("delta {delta} inconsistent with (omega_r - omega_g)/2 + Delta/2 = {}", p.delta)));
        }
        Ok(p)
    }

    /// The maximal-entanglement operating point: `K` loops in `interaction_time`,
    /// `Δ = 2πK/T`, `g = Δ/(4√K)`, microwave amplitude on the first IDD branch.
    pub fn operating_point(omega_g: f64, omega_r: f64, loops: usize, interaction_time: f64) -> Result<Self> {
        if loops == 0 || interaction_time <= 0.0 {
            return Err(Error::InvalidParameter("loops and interaction time must be positive".into()));
        }
        let big_delta = TWO_PI * loops as f64 / interaction_time;
        let g = big_delta / (4.0 * (loops as f64).sqrt());
        let delta = 0.5 * (omega_r - omega_g) + 0.5 * big_delta;
        let omega_mu = idd_amplitude(delta, 1)?;
        let j2 = bessel_j(2, 4.0 * omega_mu / delta);
        Self::new(omega_g, omega_r, big_delta, g / j2, omega_mu)
    }

    pub fn operating_default() -> Self {
        Self::operating_point(OMEGA_G_DEFAULT, OMEGA_R_DEFAULT, LOOPS_DEFAULT, INTERACTION_TIME_DEFAULT)
            .expect("default operating point is valid")
    }

    pub fn detuning_is_small(&self) -> bool {
        self.big_delta.abs() < 0.2 * (self.omega_r - self.omega_g).abs()
    }

    /// Argument `4Ω_μ/δ` of the Bessel prefactors.
    pub fn bessel_argument(&self) -> f64 {
        4.0 * self.omega_mu / self.delta
    }

    /// `g = Ω_g·J₂(4Ω_μ/δ)`.
    pub fn coupling_strength(&self) -> f64 {
        coupling_strength(self)
    }

    /// Factor `J₀(4Ω_μ/δ)` multiplying qubit-frequency noise while the microwaves are on.
    pub fn dephasing_prefactor(&self) -> f64 {
        bessel_j(0, self.bessel_argument())
    }

    /// Duration of one phase-space loop, `2π/|Δ|`.
    pub fn loop_time(&self) -> f64 {
        TWO_PI / self.big_delta.abs()
    }

    /// Same parameters with the gradient coupling rescaled so that `g` takes the given value.
    pub fn with_coupling(&self, g: f64) -> Result<Self> {
        let j2 = bessel_j(2, self.bessel_argument());
        if j2 == 0.0 {
            return Err(Error::InvalidParameter("J2(4Ω_μ/δ) vanishes; coupling cannot be set".into()));
        }
        Ok(EffectiveParams { big_omega_g: g / j2, ..*self })
    }
}

/// `Ω_μ` on the `branch`-th IDD point, where `J₀(4Ω_μ/δ) = 0`.
pub fn idd_amplitude(delta: f64, branch: usize) -> Result<f64> {
    if delta <= 0.0 || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    if branch == 0 {
        return Err(Error::InvalidParameter("IDD branches are numbered from 1".into()));
    }
    Ok(delta * j0_zero(branch) / 4.0)
}

pub fn coupling_strength(p: &EffectiveParams) -> f64 {
    p.big_omega_g * bessel_j(2, p.bessel_argument())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idd_branches() {
        let d = TWO_PI * 1e6;
        let r1 = idd_amplitude(d, 1).unwrap() / d;
        assert!((r1 - 0.601).abs() < 5e-4);
        assert!((r1 - 2.404_825_557_695_773 / 4.0).abs() < 1e-13);
        assert!((idd_amplitude(d, 2).unwrap() / d - 5.520_078_110_286_311 / 4.0).abs() < 1e-12);
        assert!(idd_amplitude(-1.0, 1).is_err());
        assert!(idd_amplitude(d, 0).is_err());
    }

    #[test]
    fn delta_relation_enforced() {
        let p = EffectiveParams::operating_default();
        let expect = 0.5 * (p.omega_r - p.omega_g) + 0.5 * p.big_delta;
        assert_eq!(p.delta, expect);
        assert!(p.detuning_is_small());
        assert!(EffectiveParams::with_delta_check(p.omega_g, p.omega_r, p.delta * 1.01, p.big_delta, p.big_omega_g, p.omega_mu).is_err());
    }

    #[test]
    fn operating_point_coupling() {
        let p = EffectiveParams::operating_default();
        let k = LOOPS_DEFAULT as f64;
        assert!((p.big_delta - TWO_PI * k / INTERACTION_TIME_DEFAULT).abs() < 1e-9);
        assert!((p.coupling_strength() - p.big_delta / (4.0 * k.sqrt())).abs() < 1e-9);
        assert!(p.dephasing_prefactor().abs() < 1e-14);
    }

    #[test]
    fn coupling_is_linear_and_vanishes_without_microwaves() {
        let p = EffectiveParams::operating_default();
        let off = EffectiveParams { omega_mu: 0.0, ..p };
        assert_eq!(off.coupling_strength(), 0.0);
        let double = EffectiveParams { big_omega_g: 2.0 * p.big_omega_g, ..p };
        assert!((double.coupling_strength() - 2.0 * p.coupling_strength()).abs() < 1e-9);
        // J2(x) = (2/x) J1(x) at the first zero of J0; J1(2.404826) = 0.519147.
        let ratio = p.coupling_strength() / p.big_omega_g;
        assert!((ratio - 0.431_76).abs() < 1e-5);
    }
}
