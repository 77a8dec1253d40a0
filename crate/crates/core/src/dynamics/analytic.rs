//! Closed-form propagation of the spin-dependent force
//! `H = g(σ_z1 − σ_z2)(a e^{iΔt} + a† e^{−iΔt})`.
//!
//! `σ_z1 − σ_z2` is diagonal in the two-qutrit basis, so each basis state
//! with eigenvalue λ sees a forced oscillator whose propagator is exactly
//! `e^{−iΘ_λ} D(α_λ)` with
//!
//! ```text
//! α_λ(t) = (gλ/Δ)(e^{−iΔt} − 1),   Θ_λ(t) = (gλ/Δ)²(Δt − sin Δt).
//! ```

use serde::{Deserialize, Serialize};

use super::params::EffectiveParams;
use crate::hilbert::{annihilation, c, cr, expm_hermitian, force_eigenvalue, CMat, HilbertSpec, QuantumState, C64, SPIN_DIM};
use crate::{Error, Result};

/// Displacement and geometric phase of one force eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceTrajectory {
    pub lambda: f64,
    pub alpha: C64,
    pub theta: f64,
}

/// Trajectory for a drive `gλ(a e^{i(Δt+φ)} + h.c.)` switched on over `[t0, t1]`.
///
/// `Θ` depends only on the elapsed time, `α` on both endpoints and on the
/// drive phase `φ`.
pub fn segment_trajectory(g: f64, big_delta: f64, lambda: f64, phase: f64, t0: f64, t1: f64) -> PhaseSpaceTrajectory {
    let tau = t1 - t0;
    let f = g * lambda;
    if big_delta == 0.0 {
        return PhaseSpaceTrajectory { lambda, alpha: c(0.0, -f * tau) * C64::from_polar(1.0, -phase), theta: 0.0 };
    }
    let r = f / big_delta;
    let alpha = cr(r) * C64::from_polar(1.0, -phase) * (C64::from_polar(1.0, -big_delta * t1) - C64::from_polar(1.0, -big_delta * t0));
    let x = big_delta * tau;
    PhaseSpaceTrajectory { lambda, alpha, theta: r * r * (x - x.sin()) }
}

/// Trajectory from `t = 0` with zero drive phase.
pub fn trajectory(g: f64, big_delta: f64, lambda: f64, t: f64) -> PhaseSpaceTrajectory {
    if big_delta == 0.0 {
        log::warn!("Δ = 0: the phase-space trajectory does not close");
    }
    segment_trajectory(g, big_delta, lambda, 0.0, 0.0, t)
}

/// `D(α) = exp(α a† − α* a)` on a truncated Fock space, computed from the
/// truncated generator so that it is exactly unitary.
pub fn displacement(alpha: C64, n: usize) -> CMat {
    if alpha == C64::new(0.0, 0.0) {
        return CMat::identity(n, n);
    }
    let a = annihilation(n);
    // α a† − α* a = −i·H with H = i(α a† − α* a) Hermitian.
    let gen = a.adjoint() * alpha - &a * alpha.conj();
    let h = gen * c(0.0, 1.0);
    expm_hermitian(&h, 1.0)
}

/// Matrix elements `⟨m|D(α)|n⟩` of the untruncated displacement operator,
/// from the associated-Laguerre closed form.
pub fn displacement_elements(alpha: C64, n: usize) -> CMat {
    let x = alpha.norm_sqr();
    let pref = (-0.5 * x).exp();
    let mut d = CMat::zeros(n, n);
    for row in 0..n {
        for col in 0..n {
            let (lo, hi) = if row >= col { (col, row) } else { (row, col) };
            let k = hi - lo;
            // sqrt(lo!/hi!)
            let ratio: f64 = ((lo + 1)..=hi).map(|j| 1.0 / (j as f64).sqrt()).product();
            let lag = laguerre(lo, k as f64, x);
            let base = if row >= col { alpha } else { -alpha.conj() };
            d[(row, col)] = base.powu(k as u32) * (pref * ratio * lag);
        }
    }
    d
}

/// Generalised Laguerre polynomial `L_n^{(a)}(x)` by its three-term recurrence.
pub fn laguerre(n: usize, a: f64, x: f64) -> f64 {
    let mut l0 = 1.0;
    if n == 0 {
        return l0;
    }
    let mut l1 = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + a - x) * l1 - (kf + a) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// Motional propagator `e^{−iΘ} D(α)` of one force eigenvalue.
pub fn sector_unitary(traj: &PhaseSpaceTrajectory, n: usize) -> CMat {
    displacement(traj.alpha, n) * C64::from_polar(1.0, -traj.theta)
}

/// Full-space propagator of the spin-dependent force from 0 to `t`, block diagonal over spin states.
pub fn analytic_unitary(g: f64, big_delta: f64, t: f64, spec: &HilbertSpec) -> CMat {
    let n = spec.fock_dim;
    let mut u = CMat::zeros(spec.dim(), spec.dim());
    for s in 0..SPIN_DIM {
        let traj = trajectory(g, big_delta, force_eigenvalue(s), t);
        let block = sector_unitary(&traj, n);
        u.view_mut((s * n, s * n), (n, n)).copy_from(&block);
    }
    u
}

/// Noiseless evolution of `init` for time `t` under the spin-dependent force at parameters `p`.
pub fn propagate_analytic(p: &EffectiveParams, t: f64, init: &QuantumState) -> Result<QuantumState> {
    if t < 0.0 {
        return Err(Error::InvalidParameter("negative evolution time".into()));
    }
    let dim = init.dim();
    if dim % SPIN_DIM != 0 || dim / SPIN_DIM < 2 {
        return Err(Error::DimensionMismatch { expected: SPIN_DIM * (dim / SPIN_DIM).max(2), got: dim });
    }
    let spec = HilbertSpec::new(dim / SPIN_DIM)?;
    let g = p.coupling_strength();
    if p.big_delta == 0.0 {
        log::warn!("Δ = 0: the phase-space trajectory does not close");
    }
    init.evolve(&analytic_unitary(g, p.big_delta, t, &spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TWO_PI;

    #[test]
    fn loops_close_and_phase_adds() {
        let (g, d) = (1.3e3, 9.0e4);
        for lambda in [-2.0, -1.0, 1.0, 2.0] {
            let one = trajectory(g, d, lambda, TWO_PI / d);
            assert!(one.alpha.norm() < 1e-12);
            assert!((one.theta - TWO_PI * (g * lambda / d).powi(2)).abs() < 1e-12);
            for k in 2..5 {
                let tk = trajectory(g, d, lambda, k as f64 * TWO_PI / d);
                assert!(tk.alpha.norm() < 1e-12);
                assert!((tk.theta - k as f64 * one.theta).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_detuning_limit() {
        let t = trajectory(2.0, 0.0, 1.0, 0.5);
        assert!((t.alpha - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn truncated_displacement_matches_laguerre_elements() {
        let alpha = c(0.4, -0.3);
        let n = 40;
        let d = displacement(alpha, n);
        let exact = displacement_elements(alpha, n);
        for i in 0..8 {
            for j in 0..8 {
                assert!((d[(i, j)] - exact[(i, j)]).norm() < 1e-12, "({i},{j})");
            }
        }
        // Coherent-state amplitude on |0⟩.
        assert!((exact[(0, 0)].re - (-0.5 * alpha.norm_sqr()).exp()).abs() < 1e-15);
        assert!((&d * d.adjoint() - CMat::identity(n, n)).norm() < 1e-12);
    }

    #[test]
    fn maximal_entanglement_condition() {
        let k: f64 = 8.0;
        let d = 1.0e5;
        let g = d / (4.0 * k.sqrt());
        let diff = k * trajectory(g, d, 2.0, TWO_PI / d).theta;
        assert!((diff - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
