//! Pulse schedules as ordered lists of timed segments.
//!
//! Durations are kept as integer nanoseconds and phases as integer multiples
//! of π/1024, so timing sums are exact and schedules serialise losslessly.

use serde::{Deserialize, Serialize};

use super::walsh::{sign_flips, walsh_signs};
use crate::dynamics::analytic::trajectory;
use crate::dynamics::EffectiveParams;
use crate::hilbert::{basis_ket, force_eigenvalue, global_rotation, phi_bell, CMat, CVec, Level, C64, SPIN_DIM};
use crate::{Error, Result, TWO_PI};

/// Phase quantum: π/1024 rad.
pub const PHASE_UNIT: f64 = std::f64::consts::PI / 1024.0;
/// Phase of an x pulse.
pub const PHASE_X: i32 = 0;
/// Phase of a y pulse.
pub const PHASE_Y: i32 = 512;
pub const PHASE_UNITS_PER_TURN: i32 = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    /// Gradient and bichromatic microwaves both at full amplitude.
    Interaction,
    PiPulse,
    Pi2Pulse,
    Idle,
    RampUp,
    RampDown,
}

/// Amplitude envelope of one drive field over a segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    Off,
    On,
    /// `sin²(πt/2T)`.
    Rising,
    /// `cos²(πt/2T)`.
    Falling,
}

impl Envelope {
    /// Amplitude at fractional position `x ∈ [0, 1]` of the segment.
    pub fn amplitude(self, x: f64) -> f64 {
        match self {
            Envelope::Off => 0.0,
            Envelope::On => 1.0,
            Envelope::Rising => (0.5 * std::f64::consts::PI * x).sin().powi(2),
            Envelope::Falling => (0.5 * std::f64::consts::PI * x).cos().powi(2),
        }
    }

    pub fn is_constant(self) -> bool {
        matches!(self, Envelope::Off | Envelope::On)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub duration_ns: u64,
    /// Pulse phase in units of π/1024 (x = 0, y = 512).
    #[serde(rename = "phase_pi_over_1024")]
    pub phase_units: i32,
    pub walsh_sign: i8,
    /// Extra gate detuning during this segment, rad/s.
    #[serde(rename = "detuning_offset_rad_s")]
    pub detuning_offset: f64,
    pub gradient: Envelope,
    pub microwave: Envelope,
}

impl Segment {
    fn base(kind: SegmentKind, duration_ns: u64) -> Self {
        Segment {
            kind,
            duration_ns,
            phase_units: 0,
            walsh_sign: 1,
            detuning_offset: 0.0,
            gradient: Envelope::Off,
            microwave: Envelope::Off,
        }
    }

    pub fn interaction(duration_ns: u64, walsh_sign: i8) -> Self {
        Segment { walsh_sign, gradient: Envelope::On, microwave: Envelope::On, ..Self::base(SegmentKind::Interaction, duration_ns) }
    }

    pub fn pulse(kind: SegmentKind, duration_ns: u64, phase_units: i32) -> Self {
        Segment { phase_units: phase_units.rem_euclid(PHASE_UNITS_PER_TURN), ..Self::base(kind, duration_ns) }
    }

    pub fn idle(duration_ns: u64, gradient: Envelope, microwave: Envelope) -> Self {
        Segment { gradient, microwave, ..Self::base(SegmentKind::Idle, duration_ns) }
    }

    pub fn ramp(kind: SegmentKind, duration_ns: u64, gradient: Envelope, microwave: Envelope) -> Self {
        Segment { gradient, microwave, ..Self::base(kind, duration_ns) }
    }

    pub fn duration(&self) -> f64 {
        self.duration_ns as f64 * 1e-9
    }

    pub fn phase(&self) -> f64 {
        self.phase_units as f64 * PHASE_UNIT
    }

    /// Nominal rotation angle of a pulse segment.
    pub fn rotation_angle(&self) -> Option<f64> {
        match self.kind {
            SegmentKind::PiPulse => Some(std::f64::consts::PI),
            SegmentKind::Pi2Pulse => Some(std::f64::consts::FRAC_PI_2),
            _ => None,
        }
    }

    pub fn is_pulse(&self) -> bool {
        self.rotation_angle().is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSchedule {
    pub segments: Vec<Segment>,
    /// Common ac Zeeman shift Δ_ac of the gradient field at full amplitude (rad/s).
    #[serde(rename = "ac_zeeman_common_rad_s")]
    pub ac_zeeman_common: f64,
    /// Additional shift of ion 1 relative to ion 2, δ_ac (rad/s).
    #[serde(rename = "ac_zeeman_differential_rad_s")]
    pub ac_zeeman_differential: f64,
    /// When set, the pulse phase register follows the ac Zeeman shift seen by
    /// ion 2, so only the differential shift acts on the qubits.
    pub frame_tracks_ion2: bool,
}

impl GateSchedule {
    pub fn total_duration_ns(&self) -> u64 {
        self.segments.iter().map(|s| s.duration_ns).sum()
    }

    pub fn total_duration(&self) -> f64 {
        self.total_duration_ns() as f64 * 1e-9
    }

    pub fn count(&self, kind: SegmentKind) -> usize {
        self.segments.iter().filter(|s| s.kind == kind).count()
    }

    pub fn interaction_time_ns(&self) -> u64 {
        self.segments.iter().filter(|s| s.kind == SegmentKind::Interaction).map(|s| s.duration_ns).sum()
    }

    pub fn ramp_time_ns(&self) -> u64 {
        self.segments.iter().filter(|s| matches!(s.kind, SegmentKind::RampUp | SegmentKind::RampDown)).map(|s| s.duration_ns).sum()
    }

    /// Walsh signs of the interaction segments, in order.
    pub fn walsh_pattern(&self) -> Vec<i8> {
        self.segments.iter().filter(|s| s.kind == SegmentKind::Interaction).map(|s| s.walsh_sign).collect()
    }

    /// Checks the segment-level invariants.
    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            if s.walsh_sign != 1 && s.walsh_sign != -1 {
                return Err(Error::Schedule(format!("segment {i}: walsh_sign must be ±1")));
            }
            if s.duration_ns == 0 && !s.is_pulse() {
                return Err(Error::Schedule(format!("segment {i}: non-pulse segments need a positive duration")));
            }
            if !s.detuning_offset.is_finite() {
                return Err(Error::Schedule(format!("segment {i}: detuning offset must be finite")));
            }
            if !(0..PHASE_UNITS_PER_TURN).contains(&s.phase_units) {
                return Err(Error::Schedule(format!("segment {i}: phase outside [0, 2π)")));
            }
        }
        if !self.ac_zeeman_common.is_finite() || !self.ac_zeeman_differential.is_finite() {
            return Err(Error::Schedule("ac Zeeman shifts must be finite".into()));
        }
        Ok(())
    }

    /// The Walsh signs must agree with the parity of π pulses preceding each
    /// interaction segment: a π pulse conjugates `σ_z → −σ_z`.
    pub fn walsh_consistent(&self) -> bool {
        let mut flips = 0usize;
        let mut first: Option<i8> = None;
        for s in &self.segments {
            match s.kind {
                SegmentKind::PiPulse => flips += 1,
                SegmentKind::Interaction => {
                    let f = *first.get_or_insert(s.walsh_sign);
                    let expect = if flips % 2 == 0 { f } else { -f };
                    if s.walsh_sign != expect {
                        return false;
                    }
                }
                _ => {}
            }
        }
        true
    }
}

/// Ramp shape of the drive fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvelopeSpec {
    pub ramp_duration_ns: u64,
}

impl Default for EnvelopeSpec {
    fn default() -> Self {
        EnvelopeSpec { ramp_duration_ns: 5_000 }
    }
}

/// Options of the entangling schedule beyond the physical parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglingOptions {
    /// Number of interaction segments (one phase-space loop each).
    pub segments: usize,
    /// Interleave π pulses following the Walsh pattern; otherwise all signs are +1.
    pub walsh: bool,
    /// Duration of each π and π/2 pulse; zero means instantaneous.
    pub pulse_duration_ns: u64,
    /// Common ac Zeeman shift of the gradient (rad/s).
    pub ac_zeeman_common: f64,
    /// Required total duration, if any.
    pub expected_total_ns: Option<u64>,
}

impl Default for EntanglingOptions {
    fn default() -> Self {
        EntanglingOptions { segments: 8, walsh: true, pulse_duration_ns: 0, ac_zeeman_common: -TWO_PI * 400e3, expected_total_ns: None }
    }
}

/// The entangling gate: π/2, then 8 × [ramps, one loop of interaction, ramps]
/// with π pulses (phases x, y, x, …) where the Walsh sign changes, then π/2.
pub fn build_entangling_schedule(p: &EffectiveParams, env: &EnvelopeSpec) -> Result<GateSchedule> {
    build_entangling_schedule_with(p, env, &EntanglingOptions::default())
}

pub fn build_entangling_schedule_with(p: &EffectiveParams, env: &EnvelopeSpec, opts: &EntanglingOptions) -> Result<GateSchedule> {
    if p.big_delta == 0.0 {
        return Err(Error::Schedule("gate detuning Δ must be non-zero to close phase-space loops".into()));
    }
    let signs = if opts.walsh {
        walsh_signs(opts.segments)?
    } else {
        if opts.segments == 0 {
            return Err(Error::Schedule("need at least one interaction segment".into()));
        }
        vec![1; opts.segments]
    };
    let loop_ns = (p.loop_time() * 1e9).round() as u64;
    if loop_ns == 0 {
        return Err(Error::Schedule("loop time rounds to zero nanoseconds".into()));
    }
    let flips = sign_flips(&signs);
    let ramp = env.ramp_duration_ns;

    let mut segments = vec![Segment::pulse(SegmentKind::Pi2Pulse, opts.pulse_duration_ns, PHASE_X)];
    let mut pi_count = 0;
    for (k, &sign) in signs.iter().enumerate() {
        if ramp > 0 {
            segments.push(Segment::ramp(SegmentKind::RampUp, ramp, Envelope::Rising, Envelope::Off));
            segments.push(Segment::ramp(SegmentKind::RampUp, ramp, Envelope::On, Envelope::Rising));
        }
        segments.push(Segment::interaction(loop_ns, sign));
        if ramp > 0 {
            segments.push(Segment::ramp(SegmentKind::RampDown, ramp, Envelope::On, Envelope::Falling));
            segments.push(Segment::ramp(SegmentKind::RampDown, ramp, Envelope::Falling, Envelope::Off));
        }
        if flips.contains(&k) {
            let phase = if pi_count % 2 == 0 { PHASE_X } else { PHASE_Y };
            segments.push(Segment::pulse(SegmentKind::PiPulse, opts.pulse_duration_ns, phase));
            pi_count += 1;
        }
    }
    segments.push(Segment::pulse(SegmentKind::Pi2Pulse, opts.pulse_duration_ns, PHASE_X));
    let mut schedule =
        GateSchedule { segments, ac_zeeman_common: opts.ac_zeeman_common, ac_zeeman_differential: 0.0, frame_tracks_ion2: false };
    let last = schedule.segments.len() - 1;
    schedule.segments[last].phase_units = final_pulse_phase(&schedule, p)?;
    schedule.validate()?;
    if let Some(target) = opts.expected_total_ns {
        let total = schedule.total_duration_ns();
        if total != target {
            return Err(Error::Schedule(format!("segment durations sum to {total} ns, expected {target} ns")));
        }
    }
    Ok(schedule)
}

/// Ideal two-qutrit propagator of a schedule: pulses as instantaneous
/// rotations and each interaction segment as its geometric phase only.
pub fn ideal_spin_unitary(schedule: &GateSchedule, p: &EffectiveParams) -> CMat {
    let g = p.coupling_strength();
    let mut u = CMat::identity(SPIN_DIM, SPIN_DIM);
    for seg in &schedule.segments {
        if let Some(theta) = seg.rotation_angle() {
            u = global_rotation(theta, seg.phase()) * u;
        } else if seg.kind == SegmentKind::Interaction {
            let d = CMat::from_fn(SPIN_DIM, SPIN_DIM, |i, j| {
                if i == j {
                    let tr = trajectory(g, p.big_delta + seg.detuning_offset, force_eigenvalue(i), seg.duration());
                    C64::from_polar(1.0, -tr.theta)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            u = d * u;
        }
    }
    u
}

/// Phase of the closing π/2 pulse that maps |↓↓⟩ to |Φ⟩ = (|↓↓⟩ + i|↑↑⟩)/√2.
fn final_pulse_phase(schedule: &GateSchedule, p: &EffectiveParams) -> Result<i32> {
    let mut head = schedule.clone();
    head.segments.pop();
    let psi: CVec = ideal_spin_unitary(&head, p) * basis_ket(Level::Down, Level::Down);
    let target = phi_bell();
    let mut best = (f64::NEG_INFINITY, 0);
    for k in 0..PHASE_UNITS_PER_TURN {
        let out = global_rotation(std::f64::consts::FRAC_PI_2, k as f64 * PHASE_UNIT) * &psi;
        let f = target.dotc(&out).norm_sqr();
        if f > best.0 + 1e-12 {
            best = (f, k);
        }
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_entangling_timing() {
        let p = EffectiveParams::operating_default();
        let opts = EntanglingOptions { expected_total_ns: Some(740_000), ..Default::default() };
        let s = build_entangling_schedule_with(&p, &EnvelopeSpec::default(), &opts).unwrap();
        assert_eq!(s.total_duration_ns(), 740_000);
        assert_eq!(s.interaction_time_ns(), 580_000);
        assert_eq!(s.ramp_time_ns(), 160_000);
        assert_eq!(s.count(SegmentKind::Interaction), 8);
        assert_eq!(s.count(SegmentKind::PiPulse), 5);
        assert_eq!(s.count(SegmentKind::Pi2Pulse), 2);
        assert!(s.segments.iter().filter(|x| x.kind == SegmentKind::Interaction).all(|x| x.duration_ns == 72_500));
        let pattern = s.walsh_pattern();
        assert_eq!(pattern.iter().map(|&v| v as i32).sum::<i32>(), 0);
        assert!(s.walsh_consistent());
        let phases: Vec<i32> = s.segments.iter().filter(|x| x.kind == SegmentKind::PiPulse).map(|x| x.phase_units).collect();
        assert_eq!(phases, vec![PHASE_X, PHASE_Y, PHASE_X, PHASE_Y, PHASE_X]);
    }

    #[test]
    fn zero_ramps_leave_only_interaction() {
        let p = EffectiveParams::operating_default();
        let s = build_entangling_schedule(&p, &EnvelopeSpec { ramp_duration_ns: 0 }).unwrap();
        assert_eq!(s.total_duration_ns(), 580_000);
    }

    #[test]
    fn timing_mismatch_is_reported() {
        let p = EffectiveParams::operating_default();
        let opts = EntanglingOptions { expected_total_ns: Some(700_000), ..Default::default() };
        assert!(matches!(build_entangling_schedule_with(&p, &EnvelopeSpec::default(), &opts), Err(Error::Schedule(_))));
    }

    #[test]
    fn ideal_model_produces_bell_state() {
        let p = EffectiveParams::operating_default();
        for walsh in [true, false] {
            let opts = EntanglingOptions { walsh, ..Default::default() };
            let s = build_entangling_schedule_with(&p, &EnvelopeSpec::default(), &opts).unwrap();
            let out = ideal_spin_unitary(&s, &p) * basis_ket(Level::Down, Level::Down);
            assert!((phi_bell().dotc(&out).norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
