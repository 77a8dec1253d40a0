//! Pulse schedules for the entangling gate and single-ion addressing, their
//! execution, and the IDD spin-echo experiment.

pub mod addressing;
pub mod executor;
pub mod idd_echo;
pub mod schedule;
pub mod serial;
pub mod walsh;

pub use addressing::{build_addressing_schedule, calibrate_addressing_phase};
pub use executor::{execute, run_spin, schedule_to_propagator, ExecOptions};
pub use idd_echo::{fit_coherence_time, idd_echo_experiment, DephasingNoiseModel, IddEchoConfig};
pub use schedule::{
    build_entangling_schedule, build_entangling_schedule_with, EntanglingOptions, Envelope, EnvelopeSpec, GateSchedule, Segment,
    SegmentKind,
};
pub use walsh::walsh_signs;
