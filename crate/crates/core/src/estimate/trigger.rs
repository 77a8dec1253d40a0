//! Trigger splitting and selection of the best dataset.
//!
//! Each dataset is halved deterministically from a hash of its id. One half
//! gives a trigger fidelity used only for choosing among datasets; the
//! other half gives the reported estimate.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, ReferenceData};
use super::pipeline::{analyze, Method};
use super::states::TargetState;
use crate::detect::{CountHistogram, CountHistogram as H};
use crate::rng::{derive, hash_id, stream};
use crate::{Error, Result};

/// Random half of a histogram's trials and the remaining half.
fn halve(h: &CountHistogram, seed: u64, index: u64) -> (CountHistogram, CountHistogram) {
    let mut counts = h.expand();
    counts.shuffle(&mut stream(seed, index));
    let mid = counts.len() / 2;
    let make = |part: &[usize]| H::from_counts(h.context, h.phase_milliradians, part, h.n_bins());
    (make(&counts[..mid]), make(&counts[mid..]))
}

/// Splits `dataset` into (trigger half, analysis half).
///
/// Population sets are halved trial by trial. Parity sets of |Φ⟩ data go
/// whole to alternating halves; parity sets of |Ψ₋⟩ data are halved.
pub fn trigger_split(dataset: &Dataset, seed: u64) -> (Dataset, Dataset) {
    let s = derive(hash_id(dataset.id), seed);
    let mut trigger = Dataset { id: dataset.id, target: dataset.target, population: Vec::new(), parity: Vec::new() };
    let mut analysis = trigger.clone();
    for (i, h) in dataset.population.iter().enumerate() {
        let (a, b) = halve(h, s, i as u64);
        trigger.population.push(a);
        analysis.population.push(b);
    }
    match dataset.target {
        TargetState::Symmetric => {
            let offset = (s >> 63) as usize;
            for (i, h) in dataset.parity.iter().enumerate() {
                if (i + offset) % 2 == 0 {
                    trigger.parity.push(h.clone());
                } else {
                    analysis.parity.push(h.clone());
                }
            }
        }
        TargetState::Antisymmetric => {
            for (i, h) in dataset.parity.iter().enumerate() {
                let (a, b) = halve(h, s, (dataset.population.len() + i) as u64);
                trigger.parity.push(a);
                analysis.parity.push(b);
            }
        }
    }
    (trigger, analysis)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TriggerSelection {
    /// Index of the dataset with the highest trigger fidelity.
    pub selected: usize,
    pub trigger_fidelities: Vec<f64>,
    /// Analysis-half fidelity of the selected dataset.
    pub reported: f64,
}

/// Picks the dataset with the highest trigger fidelity and reports its
/// analysis half. `references[k]` belongs to `datasets[k]`.
pub fn trigger_select(datasets: &[Dataset], references: &[ReferenceData], method: Method, seed: u64) -> Result<TriggerSelection> {
    if datasets.is_empty() || datasets.len() != references.len() {
        return Err(Error::InvalidParameter("need one reference per dataset".into()));
    }
    let mut trigger_fidelities = Vec::with_capacity(datasets.len());
    let mut halves = Vec::with_capacity(datasets.len());
    for (d, r) in datasets.iter().zip(references) {
        let (t, a) = trigger_split(d, seed);
        let f = analyze(&t, r, &[method])?.fidelity(method).expect("requested method");
        trigger_fidelities.push(f);
        halves.push(a);
    }
    let selected = trigger_fidelities.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).expect("non-empty");
    let reported = analyze(&halves[selected], &references[selected], &[method])?.fidelity(method).expect("requested method");
    Ok(TriggerSelection { selected, trigger_fidelities, reported })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{reference_pmfs, ReferenceModel};
    use crate::estimate::dataset::{synthesize_dataset, DatasetShape};
    use crate::estimate::states::synthetic_state;

    fn data(target: TargetState, id: u64) -> Dataset {
        let model = ReferenceModel::default();
        let rho = synthetic_state(target, 0.99, 0.0).unwrap();
        synthesize_dataset(&rho, &reference_pmfs(&model), target, &DatasetShape::standard(target), id, 5)
    }

    #[test]
    fn deterministic_and_disjoint() {
        let d = data(TargetState::Symmetric, 17);
        let (t1, a1) = trigger_split(&d, 0);
        let (t2, a2) = trigger_split(&d, 0);
        assert_eq!(t1, t2);
        assert_eq!(a1, a2);
        assert_eq!(t1.population_trials(), 4000);
        assert_eq!(a1.population_trials(), 4000);
        assert_eq!((t1.parity.len(), a1.parity.len()), (26, 26));
        for (i, (t, a)) in t1.population.iter().zip(&a1.population).enumerate() {
            let mut sum = t.clone();
            sum.merge(a).unwrap();
            assert_eq!(sum, d.population[i]);
        }
        // No parity set appears in both halves.
        for h in &t1.parity {
            assert!(!a1.parity.iter().any(|x| x.phase_milliradians == h.phase_milliradians));
        }
    }

    #[test]
    fn antisymmetric_sets_are_halved() {
        let d = data(TargetState::Antisymmetric, 3);
        let (t, a) = trigger_split(&d, 0);
        assert_eq!(t.parity.len(), 42);
        assert!(t.parity.iter().zip(&a.parity).all(|(x, y)| x.n_trials == 100 && y.n_trials == 100));
        let (t_other, _) = trigger_split(&Dataset { id: 4, ..d.clone() }, 0);
        assert_ne!(t, t_other);
    }
}
