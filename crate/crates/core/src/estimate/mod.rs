//! Fidelity estimation from photon-count data.

pub mod bias;
pub mod bootstrap;
pub mod dataset;
pub mod leakage;
pub mod linear;
pub mod parity;
pub mod pipeline;
pub mod populations;
pub mod states;
pub mod trigger;

pub use bias::{bias_harness, BiasConfig, BiasPoint};
pub use bootstrap::{bootstrap, BootstrapConfig, FidelityEstimate};
pub use dataset::{read_bundle, synthesize_dataset, synthesize_reference_data, write_bundle, Dataset, DatasetShape, ReferenceData};
pub use leakage::{correct_leakage, leakage_forward};
pub use linear::{linear_coeffs, linear_fidelity, LinearCoeffs, LinearProgram};
pub use parity::{antisym_fidelity, bell_fidelity_parity, fit_parity_oscillation, parity_method, ParityAnalysis, ParityFit};
pub use pipeline::{analyze, Hints, Method, OriginalAnalysis};
pub use populations::{ml_populations, ml_populations_with, parity, Populations};
pub use states::{state_with_fidelity, synthetic_state, TargetState};
pub use trigger::{trigger_select, trigger_split, TriggerSelection};
