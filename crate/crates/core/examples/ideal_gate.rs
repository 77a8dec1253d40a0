//! The noiseless gate from |↓↓⟩: schedule layout, closure of the phase-space
//! loops and the resulting Bell-state fidelity.

use lfgate::dynamics::{trajectory, EffectiveParams, NoiseSpec};
use lfgate::hilbert::{basis_ket, fidelity_raw, phi_bell, Level};
use lfgate::sequence::{build_entangling_schedule, run_spin, EnvelopeSpec, ExecOptions, SegmentKind};

fn main() -> lfgate::Result<()> {
    let p = EffectiveParams::operating_default();
    let schedule = build_entangling_schedule(&p, &EnvelopeSpec::default())?;
    println!("gate duration        {:.1} us", schedule.total_duration() * 1e6);
    println!("interaction time     {:.1} us", schedule.interaction_time_ns() as f64 * 1e-3);
    println!("walsh pattern        {:?}", schedule.walsh_pattern());
    println!("pi pulses            {}", schedule.count(SegmentKind::PiPulse));

    // |α| after each whole loop for the |↑↓⟩ component (force eigenvalue 2).
    let g = p.coupling_strength();
    for k in 1..=3 {
        let tr = trajectory(g, p.big_delta, 2.0, k as f64 * p.loop_time());
        println!("after {k} loop(s)      |alpha| = {:.1e}, phase {:.4} rad", tr.alpha.norm(), tr.theta);
    }

    let dd = basis_ket(Level::Down, Level::Down);
    let rho = run_spin(&schedule, &p, &NoiseSpec::none(), &(&dd * dd.adjoint()), &ExecOptions::default())?;
    println!("Bell-state fidelity  {:.15}", fidelity_raw(&rho, &phi_bell()));
    Ok(())
}
