//! Runs a [`GateSchedule`] on the two-ion plus mode system.
//!
//! Pulses are physical spin rotations (identity on |a⟩); the Walsh signs of
//! the schedule are bookkeeping that the π pulses realise. Interaction
//! segments use the exact forced-oscillator propagators, ramps are treated
//! as dead time for the motion, and every qubit-frequency term (static
//! offset, ac Zeeman shifts) enters as a spin-diagonal phase weighted by
//! `J₀(4Ω_μ(t)/δ)` while the microwaves are on.

use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::schedule::{GateSchedule, Segment, SegmentKind};
use crate::bessel::bessel_j;
use crate::dynamics::engine::{BlockState, ForceStep};
use crate::dynamics::noise::MotionalDissipator;
use crate::dynamics::{EffectiveParams, NoiseSpec};
use crate::hilbert::{
    cr, expm_hermitian, ion_sigma_x, ion_sigma_y, ion_sigma_z, partial_trace_motion, spin_levels, spin_op, tensor_spin_motion,
    thermal_motion, CMat, CVec, HilbertSpec, QuantumState, SPIN_DIM,
};
use crate::{rng, Error, Result, TWO_PI};

/// Numerical and error-injection options of the executor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExecOptions {
    pub fock_dim: usize,
    /// Strang steps per phase-space loop when dissipation is present.
    pub substeps_per_loop: usize,
    /// Fractional over-rotation applied to every π pulse.
    pub pi_overrotation: f64,
    /// Fractional over-rotation applied to both π/2 pulses.
    pub pi2_overrotation: f64,
    /// Monte-Carlo samples for the motional-frequency residual.
    pub drift_samples: usize,
    pub seed: u64,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            fock_dim: HilbertSpec::DEFAULT_FOCK_DIM,
            substeps_per_loop: 8,
            pi_overrotation: 0.0,
            pi2_overrotation: 0.0,
            drift_samples: 500,
            seed: 0,
        }
    }
}

/// Full-space initial state: a two-qutrit state with the mode in a thermal state.
pub fn initial_state(spin: &CMat, nbar: f64, fock_dim: usize) -> QuantumState {
    if nbar <= 0.0 && is_rank_one(spin) {
        // Keep pure inputs as kets: much cheaper to propagate.
        let eig = spin.clone().symmetric_eigen();
        let (k, _) = eig.eigenvalues.iter().enumerate().fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        let psi: CVec = eig.eigenvectors.column(k).into_owned();
        let mut motion = CVec::zeros(fock_dim);
        motion[0] = cr(1.0);
        return QuantumState::Ket(psi.kronecker(&motion));
    }
    QuantumState::Density(tensor_spin_motion(spin, &thermal_motion(nbar, fock_dim)))
}

fn is_rank_one(m: &CMat) -> bool {
    ((m * m).trace().re - 1.0).abs() < 1e-13 && (m.trace().re - 1.0).abs() < 1e-13
}

/// Runs `schedule` from `init` (full space) with the given noise, averaging
/// over the motional-frequency residual when it has a spread.
pub fn schedule_to_propagator(
    schedule: &GateSchedule,
    p: &EffectiveParams,
    noise: &NoiseSpec,
    init: &QuantumState,
) -> Result<QuantumState> {
    let fock_dim = init.dim() / SPIN_DIM;
    execute(schedule, p, noise, init, &ExecOptions { fock_dim, ..Default::default() })
}

pub fn execute(
    schedule: &GateSchedule,
    p: &EffectiveParams,
    noise: &NoiseSpec,
    init: &QuantumState,
    opts: &ExecOptions,
) -> Result<QuantumState> {
    noise.validate()?;
    schedule.validate()?;
    HilbertSpec::new(opts.fock_dim)?;
    if init.dim() != SPIN_DIM * opts.fock_dim {
        return Err(Error::DimensionMismatch { expected: SPIN_DIM * opts.fock_dim, got: init.dim() });
    }
    let mean = TWO_PI * noise.motional_freq_residual.mean_hz;
    let std = TWO_PI * noise.motional_freq_residual.std_hz;
    if std == 0.0 {
        return execute_with_offset(schedule, p, noise, init, opts, mean);
    }
    let normal = Normal::new(mean, std).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let samples = opts.drift_samples.max(1);
    let offsets: Vec<f64> = (0..samples)
        .map(|k| {
            let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(rng::derive(opts.seed, k as u64));
            normal.sample(&mut r)
        })
        .collect();
    let states: Vec<CMat> = offsets
        .par_iter()
        .map(|&d| execute_with_offset(schedule, p, noise, init, opts, d).map(|s| s.into_density()))
        .collect::<Result<_>>()?;
    // Index-ordered reduction keeps the sum independent of the thread count.
    let mut acc = CMat::zeros(init.dim(), init.dim());
    for s in &states {
        acc += s;
    }
    Ok(QuantumState::Density(acc * cr(1.0 / samples as f64)))
}

/// Single trajectory with the mode frequency shifted by `offset` rad/s.
pub fn execute_with_offset(
    schedule: &GateSchedule,
    p: &EffectiveParams,
    noise: &NoiseSpec,
    init: &QuantumState,
    opts: &ExecOptions,
    offset: f64,
) -> Result<QuantumState> {
    let n = opts.fock_dim;
    let mut st = BlockState::new(init.clone(), n)?;
    let diss = MotionalDissipator::new(n, noise);
    if !diss.is_trivial() {
        st.make_density();
    }
    let g = p.coupling_strength();
    let mut t_ns: u64 = 0;
    for seg in &schedule.segments {
        let tau = seg.duration();
        let t_start = t_ns as f64 * 1e-9;
        if let Some(theta) = seg.rotation_angle() {
            let over = if seg.kind == SegmentKind::PiPulse { opts.pi_overrotation } else { opts.pi2_overrotation };
            let r = pulse_unitary(theta * (1.0 + over), seg.phase(), tau, noise.qubit_detuning);
            st.apply_spin_unitary(&r);
            st.dissipate(&diss, tau)?;
        } else {
            let phases = spin_phases(seg, schedule, p, noise);
            if seg.kind == SegmentKind::Interaction {
                let step = ForceStep { g, big_delta: p.big_delta - offset + seg.detuning_offset, phase: -offset * t_start, duration: tau };
                let sub = ((opts.substeps_per_loop as f64) * tau / p.loop_time()).ceil().max(1.0) as usize;
                st.apply_force(&step, Some(&diss), sub)?;
            } else {
                st.dissipate(&diss, tau)?;
            }
            st.apply_spin_phases(&phases);
        }
        t_ns += seg.duration_ns;
    }
    Ok(st.state)
}

/// Rotation by `theta` about the equatorial axis at `phase`, lasting `tau`
/// with qubit detuning `eps` (instantaneous if `tau = 0`), on both ions.
pub fn pulse_unitary(theta: f64, phase: f64, tau: f64, eps: f64) -> CMat {
    let ion = if tau == 0.0 || eps == 0.0 {
        crate::hilbert::ion_rotation(theta, phase)
    } else {
        let rabi = theta / tau;
        let h = (ion_sigma_x() * cr(phase.cos()) + ion_sigma_y() * cr(phase.sin())) * cr(0.5 * rabi) + ion_sigma_z() * cr(0.5 * eps);
        expm_hermitian(&h, tau)
    };
    spin_op(&ion, &ion)
}

/// Accumulated qubit phases `φ_s` over a non-pulse segment.
fn spin_phases(seg: &Segment, schedule: &GateSchedule, p: &EffectiveParams, noise: &NoiseSpec) -> [f64; SPIN_DIM] {
    let (shift1, shift2) = if schedule.frame_tracks_ion2 {
        (schedule.ac_zeeman_differential, 0.0)
    } else {
        (schedule.ac_zeeman_common + schedule.ac_zeeman_differential, schedule.ac_zeeman_common)
    };
    let arg = p.bessel_argument();
    let rate = |x: f64, shift: f64| {
        let gr = seg.gradient.amplitude(x);
        let mw = seg.microwave.amplitude(x);
        (noise.qubit_detuning + shift * gr * gr) * bessel_j(0, arg * mw)
    };
    let integrate = |shift: f64| -> f64 {
        if seg.gradient.is_constant() && seg.microwave.is_constant() {
            return rate(0.5, shift) * seg.duration();
        }
        simpson(|x| rate(x, shift), 400) * seg.duration()
    };
    let z1 = integrate(shift1);
    let z2 = if shift1 == shift2 { z1 } else { integrate(shift2) };
    let mut out = [0.0; SPIN_DIM];
    for (s, v) in out.iter_mut().enumerate() {
        let (l1, l2) = spin_levels(s);
        *v = 0.5 * (l1.sigma_z() * z1 + l2.sigma_z() * z2);
    }
    out
}

/// Composite Simpson rule on [0, 1] with `m` (even) intervals.
fn simpson<F: Fn(f64) -> f64>(f: F, m: usize) -> f64 {
    let h = 1.0 / m as f64;
    let mut s = f(0.0) + f(1.0);
    for k in 1..m {
        s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Convenience: run a schedule from a two-qutrit spin state and return the
/// reduced spin density operator.
pub fn run_spin(schedule: &GateSchedule, p: &EffectiveParams, noise: &NoiseSpec, spin: &CMat, opts: &ExecOptions) -> Result<CMat> {
    let init = initial_state(spin, noise.initial_nbar, opts.fock_dim);
    let out = execute(schedule, p, noise, &init, opts)?;
    Ok(partial_trace_motion(&out, &HilbertSpec::new(opts.fock_dim)?)?.into_density())
}
