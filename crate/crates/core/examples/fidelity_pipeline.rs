//! End to end: synthesize a dataset bundle, write it to disk, read it back and
//! report bootstrapped fidelities with both estimators.

use lfgate::detect::{reference_pmfs, ReferenceModel};
use lfgate::estimate::{
    bootstrap, read_bundle, synthesize_dataset, synthesize_reference_data, synthetic_state, write_bundle, BootstrapConfig, DatasetShape,
    Method, TargetState,
};

fn main() -> lfgate::Result<()> {
    let target = TargetState::Antisymmetric;
    let truth = 0.9977;
    let model = ReferenceModel::default().with_leak(1.7e-3);
    let pmfs = reference_pmfs(&model);
    let rho = synthetic_state(target, truth, model.leak_prob)?;
    let dataset = synthesize_dataset(&rho, &pmfs, target, &DatasetShape::standard(target), 1, 2);
    let reference = synthesize_reference_data(&model, &pmfs, 1, 18_500, 102);

    let dir = std::env::temp_dir().join("lfgate-example-bundle");
    let files = write_bundle(&dir, &dataset, &reference)?;
    println!("wrote {} files to {}", files.len(), dir.display());
    let (dataset, reference) = read_bundle(&dir)?;

    let cfg = BootstrapConfig { n_boot: 1000, seed: 1, lambda_jitter: 0.01 };
    let (original, estimates) = bootstrap(&dataset, &reference, &Method::ALL, &cfg)?;
    println!("calibrated leakage {:.2e} ± {:.1e}", original.calibration.model.leak_prob, original.calibration.sigma.leak_prob);
    println!("true fidelity {truth}");
    for e in estimates {
        println!("{:<10} {:.4}  68% CI [{:.4}, {:.4}]", e.method.name(), e.point, e.ci68.0, e.ci68.1);
    }
    Ok(())
}
