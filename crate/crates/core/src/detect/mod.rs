//! Photon-count detection: reference distributions, calibration, POVMs and
//! synthetic data.

pub mod calibrate;
pub mod histogram;
pub mod model;
pub mod povm;
pub mod synth;

pub use calibrate::{calibrate_reference, calibrate_reference_from, Calibration};
pub use histogram::{pool, Context, CountHistogram};
pub use model::{reference_pmfs, reference_pmfs_with_bins, ReferenceModel, ReferencePmfs};
pub use povm::{bright_projectors, build_povm, build_povm_with_bins, povm_from_pmfs, Analysis, PovmSet};
pub use synth::{synthesize_counts, synthesize_reference, synthesize_with_pmfs};
