//! Spin-dependent-force dynamics: parameters, closed-form and numerical
//! propagators, noise channels and the error budget.

pub mod analytic;
pub mod budget;
pub mod engine;
pub mod noise;
pub mod numeric;
pub mod params;

pub use analytic::{propagate_analytic, trajectory, PhaseSpaceTrajectory};
pub use budget::{bell_infidelity, error_budget, error_budget_with, BudgetEntry, ErrorBudget};
pub use noise::{apply_noise_channels, FrequencyResidual, NoiseSpec};
pub use numeric::{force_hamiltonian, propagate_numeric};
pub use params::{coupling_strength, idd_amplitude, EffectiveParams};
