//! Correction of measured Bell-state fidelities for leaked preparations.
//!
//! A leaked ion reads dark and the gate flips its partner. For |Φ⟩ the
//! leaked contributions add to the even populations:
//! `F_m = (1−ε)²F + ε(1−ε) + ε²/2`. For |Ψ₋⟩ only the one-bright leaked
//! state adds to `P1`: `F_m = (1−ε)²F + (ε/2)(1−ε)`.

use super::states::TargetState;
use crate::{Error, Result};

pub const MAX_LEAK: f64 = 0.1;

fn leak_offset(eps: f64, target: TargetState) -> f64 {
    match target {
        TargetState::Symmetric => eps * (1.0 - eps) + 0.5 * eps * eps,
        TargetState::Antisymmetric => 0.5 * eps * (1.0 - eps),
    }
}

/// Measured fidelity produced by true fidelity `f` with leakage `eps`.
pub fn leakage_forward(f: f64, eps: f64, target: TargetState) -> f64 {
    (1.0 - eps).powi(2) * f + leak_offset(eps, target)
}

/// Gate fidelity from the measured fidelity `f_m`.
pub fn correct_leakage(f_m: f64, eps: f64, target: TargetState) -> Result<f64> {
    if !(0.0..=MAX_LEAK).contains(&eps) {
        return Err(Error::InvalidParameter(format!("leakage {eps} outside [0, {MAX_LEAK}]")));
    }
    Ok((f_m - leak_offset(eps, target)) / (1.0 - eps).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quoted_values() {
        let sym = leakage_forward(1.0, 3.5e-3, TargetState::Symmetric);
        let eps: f64 = 3.5e-3;
        assert!((sym - (1.0 - eps + 0.5 * eps * eps)).abs() < 1e-15, "{sym}");
        assert!((sym - 0.996_512).abs() < 1e-5);
        let anti = leakage_forward(1.0, 1.7e-3, TargetState::Antisymmetric);
        assert!((anti - (1.0 - 1.5 * 1.7e-3)).abs() < 5e-6, "{anti}");
        assert_eq!(correct_leakage(0.97, 0.0, TargetState::Symmetric).unwrap(), 0.97);
        assert!(correct_leakage(0.9, 0.2, TargetState::Symmetric).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(f in 0.9f64..=1.0, eps in 0.0f64..=0.01, anti in any::<bool>()) {
            let t = if anti { TargetState::Antisymmetric } else { TargetState::Symmetric };
            let back = correct_leakage(leakage_forward(f, eps, t), eps, t).unwrap();
            prop_assert!((back - f).abs() < 1e-12);
        }

        #[test]
        fn monotone(a in 0.5f64..1.0, d in 1e-6f64..0.1, eps in 0.0f64..0.05) {
            prop_assert!(correct_leakage(a + d, eps, TargetState::Symmetric).unwrap() > correct_leakage(a, eps, TargetState::Symmetric).unwrap());
        }
    }
}
