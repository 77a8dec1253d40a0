//! Converts the gate output |Φ⟩ into the singlet |Ψ₋⟩ with the differential
//! AC-Zeeman echo, first with ideal pulses and then on the simulated state.

use lfgate::dynamics::{EffectiveParams, NoiseSpec};
use lfgate::hilbert::{basis_ket, fidelity_raw, phi_bell, psi_minus_bell, Level};
use lfgate::sequence::addressing::ADDRESSING_AC_ZEEMAN_DIFFERENTIAL;
use lfgate::sequence::{
    build_addressing_schedule, build_entangling_schedule, calibrate_addressing_phase, run_spin, EnvelopeSpec, ExecOptions,
};

fn main() -> lfgate::Result<()> {
    let diff = ADDRESSING_AC_ZEEMAN_DIFFERENTIAL;
    let (phase, ideal) = calibrate_addressing_phase(diff)?;
    println!("calibrated pulse phase {phase:.5} rad, ideal singlet fidelity {ideal:.12}");

    let p = EffectiveParams::operating_default();
    let opts = ExecOptions::default();
    let gate = build_entangling_schedule(&p, &EnvelopeSpec::default())?;
    let dd = basis_ket(Level::Down, Level::Down);
    let rho = run_spin(&gate, &p, &NoiseSpec::none(), &(&dd * dd.adjoint()), &opts)?;
    println!("after gate:       F(Phi)   = {:.12}", fidelity_raw(&rho, &phi_bell()));

    let echo = build_addressing_schedule(diff, phase)?;
    let out = run_spin(&echo, &p, &NoiseSpec::none(), &rho, &opts)?;
    println!("after addressing: F(Psi-)  = {:.12}  ({:.1} us)", fidelity_raw(&out, &psi_minus_bell()), echo.total_duration() * 1e6);
    Ok(())
}
