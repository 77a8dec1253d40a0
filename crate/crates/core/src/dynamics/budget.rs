//! Per-source infidelity budget of the entangling gate.

use serde::{Deserialize, Serialize};

use super::noise::{FrequencyResidual, NoiseSpec};
use super::params::EffectiveParams;
use crate::hilbert::{basis_ket, fidelity_raw, phi_bell, Level};
use crate::sequence::executor::{run_spin, ExecOptions};
use crate::sequence::GateSchedule;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetEntry {
    pub source: String,
    pub infidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub entries: Vec<BudgetEntry>,
    /// Sum of the per-source entries.
    pub total: f64,
}

/// Bell-state infidelity `1 − ⟨Φ|ρ|Φ⟩` of the schedule started in |↓↓⟩.
pub fn bell_infidelity(p: &EffectiveParams, noise: &NoiseSpec, schedule: &GateSchedule, opts: &ExecOptions) -> Result<f64> {
    let dd = basis_ket(Level::Down, Level::Down);
    let rho = run_spin(schedule, p, noise, &(&dd * dd.adjoint()), opts)?;
    Ok(1.0 - fidelity_raw(&rho, &phi_bell()))
}

/// Runs the gate once per non-zero noise source with every other source
/// switched off. Sources that are zero in `spec` are reported as 0.
pub fn error_budget(p: &EffectiveParams, spec: &NoiseSpec, schedule: &GateSchedule) -> Result<ErrorBudget> {
    error_budget_with(p, spec, schedule, &ExecOptions::default())
}

pub fn error_budget_with(p: &EffectiveParams, spec: &NoiseSpec, schedule: &GateSchedule, opts: &ExecOptions) -> Result<ErrorBudget> {
    spec.validate()?;
    let sources: [(&str, NoiseSpec, bool); 5] = [
        (
            "motional_dephasing",
            NoiseSpec { motional_coherence_time: spec.motional_coherence_time, ..Default::default() },
            spec.motional_coherence_time.is_some(),
        ),
        ("heating", NoiseSpec { heating_rate: spec.heating_rate, ..Default::default() }, spec.heating_rate > 0.0),
        (
            "motional_frequency_residual",
            NoiseSpec { motional_freq_residual: spec.motional_freq_residual, ..Default::default() },
            spec.motional_freq_residual != FrequencyResidual::default(),
        ),
        ("qubit_detuning", NoiseSpec { qubit_detuning: spec.qubit_detuning, ..Default::default() }, spec.qubit_detuning != 0.0),
        ("initial_thermal_occupation", NoiseSpec { initial_nbar: spec.initial_nbar, ..Default::default() }, spec.initial_nbar > 0.0),
    ];
    let mut entries = Vec::new();
    for (name, noise, active) in sources {
        let infidelity = if active { bell_infidelity(p, &noise, schedule, opts)?.max(0.0) } else { 0.0 };
        entries.push(BudgetEntry { source: name.to_string(), infidelity });
    }
    let total = entries.iter().map(|e| e.infidelity).sum();
    Ok(ErrorBudget { entries, total })
}

impl ErrorBudget {
    pub fn get(&self, source: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.source == source).map(|e| e.infidelity)
    }
}
