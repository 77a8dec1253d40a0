//! Minimum-variance linear fidelity estimator: coefficients for the
//! experiment's measurement settings and the estimate on one synthetic dataset.

use lfgate::detect::{povm_from_pmfs, reference_pmfs, Analysis, ReferenceModel};
use lfgate::estimate::{linear_fidelity, synthesize_dataset, synthetic_state, DatasetShape, LinearProgram, TargetState};

fn main() -> lfgate::Result<()> {
    let model = ReferenceModel::default().with_leak(3.5e-3);
    let pmfs = reference_pmfs(&model);
    for target in [TargetState::Symmetric, TargetState::Antisymmetric] {
        let shape = DatasetShape::standard(target);
        let rho = synthetic_state(target, 0.99, model.leak_prob)?;
        let dataset = synthesize_dataset(&rho, &pmfs, target, &shape, 0, 4);
        let settings = dataset.settings()?;
        let analyses: Vec<Analysis> = settings.iter().map(|(a, _)| *a).collect();
        let povms: Vec<_> = analyses.iter().map(|a| povm_from_pmfs(pmfs.clone(), *a)).collect();
        let trials: Vec<f64> = settings.iter().map(|(_, h)| h.n_trials as f64).collect();

        let coeffs = LinearProgram::new(&analyses, target)?.solve(&povms, &trials)?;
        println!("{}: {} settings", target.name(), analyses.len());
        println!("  leakage terms a {:+.4}, b {:+.4}, c {:+.4}", coeffs.a, coeffs.b, coeffs.c);
        println!("  constraint residual {:.1e}, predicted SD at the pure target {:.4}", coeffs.residual, coeffs.variance.sqrt());
        println!("  estimate {:.4} (true 0.99)", linear_fidelity(&dataset, &coeffs, model.leak_prob)?);
    }
    Ok(())
}
