//! Simulation and statistical-analysis toolkit for a laser-free trapped-ion
//! entangling gate driven by an oscillating magnetic field gradient and a
//! bichromatic microwave field.
//!
//! The crate is organised bottom-up:
//!
//! * [`hilbert`]: two three-level ions (|↓⟩, |↑⟩, leaked |a⟩) tensored with a
//!   truncated motional mode.
//! * [`bessel`]: Bessel functions of the first kind and the zeros of `J0`
//!   that set the intrinsic dynamical decoupling (IDD) operating points.
//! * [`dynamics`]: the spin-dependent-force interaction, exact and numerical
//!   propagators, motional noise channels and the error budget.
//! * [`sequence`]: pulse schedules for the entangling gate and for single-ion
//!   addressing, their execution, and the IDD spin-echo experiment.
//! * [`detect`]: photon-count reference model, calibration, POVMs and
//!   synthetic count data.
//! * [`estimate`]: fidelity estimators (ML parity analysis and the linear
//!   estimator), leakage correction, bootstrap, trigger selection and the
//!   bias harness.
//! * [`cli`]: configuration-driven experiments behind the `lfgate` binary.

pub mod bessel;
pub mod cli;
pub mod detect;
pub mod dynamics;
pub mod error;
pub mod estimate;
pub mod hilbert;
pub mod optim;
pub mod rng;
pub mod sequence;

pub use error::{Error, Result};

/// 2π, used everywhere cyclic frequencies are turned into angular ones.
pub const TWO_PI: f64 = std::f64::consts::TAU;
