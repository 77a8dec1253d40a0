//! Per-source infidelity of the entangling gate under the motional noise
//! measured for the experiment, plus the combined figure.

use lfgate::dynamics::EffectiveParams;
use lfgate::dynamics::{bell_infidelity, error_budget, NoiseSpec};
use lfgate::sequence::executor::ExecOptions;
use lfgate::sequence::{build_entangling_schedule, EnvelopeSpec};

fn main() -> lfgate::Result<()> {
    let p = EffectiveParams::operating_default();
    let schedule = build_entangling_schedule(&p, &EnvelopeSpec::default())?;
    let noise = NoiseSpec::experimental();
    let t = std::time::Instant::now();
    let budget = error_budget(&p, &noise, &schedule)?;
    for e in &budget.entries {
        println!("{:<30} {:.3e}", e.source, e.infidelity);
    }
    println!("{:<30} {:.3e}", "sum", budget.total);
    let combined = bell_infidelity(&p, &noise, &schedule, &ExecOptions::default())?;
    println!("{:<30} {:.3e}", "all sources together", combined);
    println!("({:.1} s)", t.elapsed().as_secs_f64());
    Ok(())
}
