//! Gate infidelity against a static qubit-frequency offset and against the
//! motional coherence time.

use lfgate::dynamics::{bell_infidelity, EffectiveParams, NoiseSpec};
use lfgate::sequence::{build_entangling_schedule, EnvelopeSpec, ExecOptions};
use lfgate::TWO_PI;

fn main() -> lfgate::Result<()> {
    let p = EffectiveParams::operating_default();
    let schedule = build_entangling_schedule(&p, &EnvelopeSpec::default())?;
    let opts = ExecOptions::default();

    println!("qubit offset (kHz)   infidelity");
    for k in 0..=10 {
        let offset_khz = -200.0 + 40.0 * k as f64;
        let noise = NoiseSpec::qubit_offset(TWO_PI * offset_khz * 1e3);
        println!("{offset_khz:>18.0}   {:.2e}", bell_infidelity(&p, &noise, &schedule, &opts)?);
    }

    println!("\nmotional T2 (ms)     infidelity");
    for tau_ms in [1.0, 3.0, 10.0, 30.0, 100.0] {
        let noise = NoiseSpec::motional_dephasing(tau_ms * 1e-3);
        println!("{tau_ms:>16.0}     {:.2e}", bell_infidelity(&p, &noise, &schedule, &opts)?);
    }
    Ok(())
}
