//! Draws bright and dark reference histograms from a known detection model
//! and recovers the model by maximum likelihood.

use lfgate::detect::{calibrate_reference, synthesize_reference, ReferenceModel};

fn main() -> lfgate::Result<()> {
    let truth = ReferenceModel::default().with_leak(1.7e-3);
    let (bright, dark) = synthesize_reference(&truth, 18_500, 3)?;
    println!("two-ion bright reference mean {:.2} counts, dark reference mean {:.3} counts", bright.mean(), dark.mean());

    let cal = calibrate_reference(&bright, &dark)?;
    let rows = [
        ("lambda_bright", truth.lambda_bright, cal.model.lambda_bright, cal.sigma.lambda_bright),
        ("lambda_dark", truth.lambda_dark, cal.model.lambda_dark, cal.sigma.lambda_dark),
        ("repump", truth.repump_rate, cal.model.repump_rate, cal.sigma.repump_rate),
        ("depump", truth.depump_rate, cal.model.depump_rate, cal.sigma.depump_rate),
        ("leak", truth.leak_prob, cal.model.leak_prob, cal.sigma.leak_prob),
    ];
    println!("{:<14} {:>10} {:>10} {:>10}", "", "true", "fitted", "sigma");
    for (name, t, f, s) in rows {
        println!("{name:<14} {t:>10.4} {f:>10.4} {s:>10.4}");
    }
    Ok(())
}
