//! Mean bias of both estimators on synthetic |Φ⟩ data of known fidelity.
//! Pass the number of replicates as the first argument (default 200).

use lfgate::estimate::{bias_harness, BiasConfig, Method, TargetState};

fn main() -> lfgate::Result<()> {
    let replicates = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let cfg = BiasConfig { n_replicates: replicates, ..BiasConfig::standard(TargetState::Symmetric) };
    let points = bias_harness(&[0.5, 0.9, 0.99, 0.999], &Method::ALL, &cfg)?;
    println!("{:>8} {:>10} {:>12} {:>10}", "F", "method", "bias", "SE");
    for p in points {
        println!("{:>8} {:>10} {:>+12.2e} {:>10.1e}", p.true_fidelity, p.method.name(), p.mean_bias, p.std_error);
    }
    Ok(())
}
