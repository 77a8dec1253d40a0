//! Synthetic two-qutrit states with a prescribed Bell-state fidelity.
//!
//! Gate errors are modelled as motional dephasing during the interaction:
//! after the first π/2 pulse, coherences between spin states with force
//! eigenvalues `λ_s`, `λ_t` decay by `exp(−γ(λ_s − λ_t)²)`, then the rest of
//! the ideal gate is applied. The fidelity with |Φ⟩ falls monotonically from
//! 1 at `γ = 0` to 3/8 for complete dephasing. Leaked ions are added
//! afterwards, one gate-flipped ion per leaked partner.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::dynamics::EffectiveParams;
use crate::hilbert::{
    basis_ket, cr, fidelity_raw, force_eigenvalue, global_rotation, phi_bell, psi_minus_bell, CMat, CVec, Level, SPIN_DIM,
};
use crate::sequence::addressing::{
    build_addressing_schedule, calibrate_addressing_phase, ideal_addressing_unitary, ADDRESSING_AC_ZEEMAN_DIFFERENTIAL,
};
use crate::sequence::schedule::ideal_spin_unitary;
use crate::sequence::{build_entangling_schedule, EnvelopeSpec};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetState {
    /// |Φ⟩ = (|↓↓⟩ + i|↑↑⟩)/√2.
    Symmetric,
    /// |Ψ₋⟩ = (|↓↑⟩ − |↑↓⟩)/√2.
    Antisymmetric,
}

impl TargetState {
    pub fn name(self) -> &'static str {
        match self {
            TargetState::Symmetric => "symmetric",
            TargetState::Antisymmetric => "antisymmetric",
        }
    }

    pub fn ket(self) -> CVec {
        match self {
            TargetState::Symmetric => phi_bell(),
            TargetState::Antisymmetric => psi_minus_bell(),
        }
    }

    pub fn projector(self) -> CMat {
        let v = self.ket();
        &v * v.adjoint()
    }
}

/// Lowest fidelity reachable by the dephasing family.
pub const MIN_FAMILY_FIDELITY: f64 = 0.375;

struct GateMaps {
    /// Gate after its first π/2 pulse.
    rest: CMat,
    addressing: CMat,
}

fn gate_maps() -> &'static GateMaps {
    static MAPS: OnceLock<GateMaps> = OnceLock::new();
    MAPS.get_or_init(|| {
        let p = EffectiveParams::operating_default();
        let schedule = build_entangling_schedule(&p, &EnvelopeSpec::default()).expect("default schedule builds");
        let u = ideal_spin_unitary(&schedule, &p);
        let rest = u * global_rotation(FRAC_PI_2, 0.0).adjoint();
        let (phase, _) = calibrate_addressing_phase(ADDRESSING_AC_ZEEMAN_DIFFERENTIAL).expect("addressing calibrates");
        let addressing = ideal_addressing_unitary(
            &build_addressing_schedule(ADDRESSING_AC_ZEEMAN_DIFFERENTIAL, phase).expect("addressing schedule builds"),
        );
        GateMaps { rest, addressing }
    })
}

/// Gate output without leakage for dephasing strength `gamma`.
pub fn dephased_gate_state(target: TargetState, gamma: f64) -> CMat {
    let maps = gate_maps();
    let mid = global_rotation(FRAC_PI_2, 0.0) * basis_ket(Level::Down, Level::Down);
    let mut rho = &mid * mid.adjoint();
    for s in 0..SPIN_DIM {
        for t in 0..SPIN_DIM {
            let d = force_eigenvalue(s) - force_eigenvalue(t);
            rho[(s, t)] *= cr((-gamma * d * d).exp());
        }
    }
    let mut out = &maps.rest * rho * maps.rest.adjoint();
    if target == TargetState::Antisymmetric {
        out = &maps.addressing * out * maps.addressing.adjoint();
    }
    out
}

/// Qubit-subspace state with fidelity `fidelity` to the target.
pub fn state_with_fidelity(target: TargetState, fidelity: f64) -> Result<CMat> {
    if !(MIN_FAMILY_FIDELITY..=1.0).contains(&fidelity) {
        return Err(Error::InvalidParameter(format!("fidelity {fidelity} outside [{MIN_FAMILY_FIDELITY}, 1]")));
    }
    let psi = target.ket();
    let f = |g: f64| fidelity_raw(&dephased_gate_state(target, g), &psi);
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) > fidelity && hi < 1e3 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > fidelity {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi.max(1e-300) {
            break;
        }
    }
    Ok(dephased_gate_state(target, 0.5 * (lo + hi)))
}

/// Adds preparation leakage `eps` per ion to a gate output `rho_f`.
pub fn with_leakage(rho_f: &CMat, eps: f64, target: TargetState) -> CMat {
    let proj = |a, b| {
        let v = basis_ket(a, b);
        &v * v.adjoint()
    };
    // The gate flips the partner of a leaked ion; addressing then acts on ion 1 only.
    let single = match target {
        TargetState::Symmetric => proj(Level::Up, Level::Leak) + proj(Level::Leak, Level::Up),
        TargetState::Antisymmetric => proj(Level::Down, Level::Leak) + proj(Level::Leak, Level::Up),
    };
    rho_f * cr((1.0 - eps).powi(2)) + single * cr(eps * (1.0 - eps)) + proj(Level::Leak, Level::Leak) * cr(eps * eps)
}

/// Full synthetic state: fidelity `fidelity` before leakage, leakage `eps`.
pub fn synthetic_state(target: TargetState, fidelity: f64, eps: f64) -> Result<CMat> {
    Ok(with_leakage(&state_with_fidelity(target, fidelity)?, eps, target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::check_density;

    #[test]
    fn family_spans_expected_range() {
        let phi = phi_bell();
        assert!((fidelity_raw(&dephased_gate_state(TargetState::Symmetric, 0.0), &phi) - 1.0).abs() < 1e-10);
        let full = fidelity_raw(&dephased_gate_state(TargetState::Symmetric, 50.0), &phi);
        assert!((full - 0.375).abs() < 1e-10, "{full}");
        // Closed form (6 + 8e^{−4γ} + 2e^{−16γ})/16.
        let g: f64 = 0.01;
        let expect = (6.0 + 8.0 * (-4.0 * g).exp() + 2.0 * (-16.0 * g).exp()) / 16.0;
        assert!((fidelity_raw(&dephased_gate_state(TargetState::Symmetric, g), &phi) - expect).abs() < 1e-10);
    }

    #[test]
    fn engineered_fidelities() {
        for target in [TargetState::Symmetric, TargetState::Antisymmetric] {
            for f in [0.5, 0.99, 0.9977, 0.999] {
                let rho = state_with_fidelity(target, f).unwrap();
                check_density(&rho, 1e-10, 1e-10).unwrap();
                assert!((fidelity_raw(&rho, &target.ket()) - f).abs() < 1e-9, "{target:?} {f}");
            }
        }
        assert!(state_with_fidelity(TargetState::Symmetric, 0.2).is_err());
    }

    #[test]
    fn leakage_keeps_trace_and_scales_fidelity() {
        let eps = 0.01;
        let rho = synthetic_state(TargetState::Antisymmetric, 0.99, eps).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!((fidelity_raw(&rho, &psi_minus_bell()) - 0.99 * (1.0 - eps).powi(2)).abs() < 1e-9);
    }
}
