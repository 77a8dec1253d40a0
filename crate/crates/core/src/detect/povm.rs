//! Count-outcome POVMs on the two-qutrit space.
//!
//! The counts depend on the state only through the number of fluorescing
//! ions, so every element factors as `Π_i = Σ_b P_b(i) E_b` where `E_b`
//! projects (after the analysis rotation) onto the basis states with `b`
//! ions in |↓⟩. [`PovmSet`] keeps that factorisation and expands the
//! elements on request.

use serde::{Deserialize, Serialize};

use super::model::{reference_pmfs_with_bins, ReferenceModel, ReferencePmfs};
use crate::hilbert::{bright_count, cr, global_rotation, CMat, SPIN_DIM};

/// Rotation applied before detection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Analysis {
    None,
    /// Global π/2 pulse with phase `phase` (radians) on both qubits.
    Pi2 {
        phase: f64,
    },
}

impl Analysis {
    pub fn rotation(&self) -> CMat {
        match *self {
            Analysis::None => CMat::identity(SPIN_DIM, SPIN_DIM),
            Analysis::Pi2 { phase } => global_rotation(std::f64::consts::FRAC_PI_2, phase),
        }
    }

    pub fn phase(&self) -> Option<f64> {
        match *self {
            Analysis::None => None,
            Analysis::Pi2 { phase } => Some(phase),
        }
    }
}

/// `E_b = R† (Σ_{s: b bright} |s⟩⟨s|) R` for `b = 0, 1, 2`.
pub fn bright_projectors(analysis: Analysis) -> [CMat; 3] {
    let r = analysis.rotation();
    let mut out = [CMat::zeros(SPIN_DIM, SPIN_DIM), CMat::zeros(SPIN_DIM, SPIN_DIM), CMat::zeros(SPIN_DIM, SPIN_DIM)];
    for s in 0..SPIN_DIM {
        let row = r.row(s);
        // R†|s⟩⟨s|R = (row s of R)† (row s of R)
        out[bright_count(s)] += row.adjoint() * row;
    }
    out
}

#[derive(Clone, Debug)]
pub struct PovmSet {
    pub analysis: Analysis,
    pub pmfs: ReferencePmfs,
    pub projectors: [CMat; 3],
}

impl PovmSet {
    pub fn n_outcomes(&self) -> usize {
        self.pmfs.n_bins()
    }

    /// `Π_i = Σ_b P_b(i) E_b`.
    pub fn element(&self, i: usize) -> CMat {
        let mut m = CMat::zeros(SPIN_DIM, SPIN_DIM);
        for b in 0..3 {
            m += &self.projectors[b] * cr(self.pmfs.pmf[b][i]);
        }
        m
    }

    pub fn elements(&self) -> Vec<CMat> {
        (0..self.n_outcomes()).map(|i| self.element(i)).collect()
    }

    /// Probabilities of the bright-ion numbers for state `rho`.
    pub fn bright_weights(&self, rho: &CMat) -> [f64; 3] {
        let w = |e: &CMat| (e * rho).trace().re.max(0.0);
        [w(&self.projectors[0]), w(&self.projectors[1]), w(&self.projectors[2])]
    }

    /// `Tr[Π_i ρ]` for every outcome.
    pub fn outcome_probabilities(&self, rho: &CMat) -> Vec<f64> {
        self.pmfs.mixture(self.bright_weights(rho))
    }
}

pub fn build_povm(model: &ReferenceModel, analysis: Analysis) -> PovmSet {
    build_povm_with_bins(model, analysis, model.n_bins())
}

pub fn build_povm_with_bins(model: &ReferenceModel, analysis: Analysis, n_bins: usize) -> PovmSet {
    povm_from_pmfs(reference_pmfs_with_bins(model, n_bins), analysis)
}

pub fn povm_from_pmfs(pmfs: ReferencePmfs, analysis: Analysis) -> PovmSet {
    PovmSet { analysis, pmfs, projectors: bright_projectors(analysis) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_ket, phi_bell, psi_minus_bell, Level};
    use proptest::prelude::*;

    fn min_eigenvalue(m: &CMat) -> f64 {
        m.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn complete_and_positive(
            lb in 5.0f64..60.0, ld in 0.0f64..3.0, rp in 0.0f64..0.05, dp in 0.0f64..0.05, phase in 0.0f64..6.3, rotate in any::<bool>()
        ) {
            let m = ReferenceModel { lambda_bright: lb, lambda_dark: ld, repump_rate: rp, depump_rate: dp, leak_prob: 0.0 };
            let analysis = if rotate { Analysis::Pi2 { phase } } else { Analysis::None };
            let povm = build_povm(&m, analysis);
            let mut sum = CMat::zeros(SPIN_DIM, SPIN_DIM);
            for e in povm.elements() {
                prop_assert!(min_eigenvalue(&e) >= -1e-10);
                sum += e;
            }
            let defect = (sum - CMat::identity(SPIN_DIM, SPIN_DIM)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
            prop_assert!(defect < 1e-10, "completeness defect {}", defect);
        }
    }

    #[test]
    fn perfect_discrimination_limit() {
        let m = ReferenceModel { lambda_bright: 200.0, lambda_dark: 0.0, repump_rate: 0.0, depump_rate: 0.0, leak_prob: 0.0 };
        let povm = build_povm(&m, Analysis::None);
        let band: CMat = (340..460).map(|i| povm.element(i)).fold(CMat::zeros(9, 9), |a, b| a + b);
        let dd = crate::hilbert::spin_index(Level::Down, Level::Down);
        assert!((band[(dd, dd)].re - 1.0).abs() < 0.1);
        assert!(band[(0, 0)].re > 0.9);
        for s in 1..9 {
            assert!(band[(s, s)].re.abs() < 1e-12);
        }
    }

    #[test]
    fn leaked_states_look_like_up_up() {
        let povm = build_povm(&ReferenceModel::default(), Analysis::None);
        let p = |a, b| {
            let v = basis_ket(a, b);
            povm.outcome_probabilities(&(&v * v.adjoint()))
        };
        let uu = p(Level::Up, Level::Up);
        for (a, b) in [(Level::Up, Level::Leak), (Level::Leak, Level::Up), (Level::Leak, Level::Leak)] {
            assert_eq!(p(a, b), uu);
        }
    }

    #[test]
    fn bell_state_weights() {
        let rho = {
            let v = phi_bell();
            &v * v.adjoint()
        };
        let w = build_povm(&ReferenceModel::default(), Analysis::None).bright_weights(&rho);
        assert!((w[0] - 0.5).abs() < 1e-14 && w[1].abs() < 1e-14 && (w[2] - 0.5).abs() < 1e-14);
        let singlet = {
            let v = psi_minus_bell();
            &v * v.adjoint()
        };
        for phase in [0.0, 0.7, 2.0] {
            let w = build_povm(&ReferenceModel::default(), Analysis::Pi2 { phase }).bright_weights(&singlet);
            assert!((w[1] - 1.0).abs() < 1e-14);
        }
    }
}
