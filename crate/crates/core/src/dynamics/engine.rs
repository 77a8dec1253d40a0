//! Block-structured propagation of the two-ion plus mode system.
//!
//! Every term acting during an interaction segment is diagonal in the
//! two-qutrit basis, so a density operator is handled as a 9×9 grid of N×N
//! motional blocks `X_st` and a coherent step maps `X_st → U_s X_st U_t†`
//! with the exact forced-oscillator propagators `U_s`. Motional dissipators
//! act on each block independently and are interleaved with the coherent
//! steps by symmetric (Strang) splitting. Spin pulses mix the blocks.

use super::analytic::{displacement, segment_trajectory};
use super::noise::MotionalDissipator;
use crate::hilbert::{force_eigenvalue, CMat, QuantumState, C64, SPIN_DIM};
use crate::{Error, Result};

/// One stretch of constant-amplitude spin-dependent force.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForceStep {
    /// Coupling `g` (rad/s).
    pub g: f64,
    /// Detuning of the drive from the mode as seen by the ions (rad/s).
    pub big_delta: f64,
    /// Drive phase at the start of the stretch.
    pub phase: f64,
    pub duration: f64,
}

/// Mutable simulation state with its Fock truncation.
#[derive(Clone, Debug)]
pub struct BlockState {
    pub fock_dim: usize,
    pub state: QuantumState,
}

impl BlockState {
    pub fn new(state: QuantumState, fock_dim: usize) -> Result<Self> {
        if state.dim() != SPIN_DIM * fock_dim {
            return Err(Error::DimensionMismatch { expected: SPIN_DIM * fock_dim, got: state.dim() });
        }
        Ok(BlockState { fock_dim, state })
    }

    /// Converts a ket to a density operator (needed once dissipation is present).
    pub fn make_density(&mut self) {
        if let QuantumState::Ket(_) = self.state {
            let rho = self.state.to_density();
            self.state = QuantumState::Density(rho);
        }
    }

    fn active(&self) -> [bool; SPIN_DIM] {
        let n = self.fock_dim;
        let mut out = [false; SPIN_DIM];
        for (s, flag) in out.iter_mut().enumerate() {
            *flag = match &self.state {
                QuantumState::Ket(v) => v.rows(s * n, n).iter().any(|z| z.norm_sqr() > 0.0),
                QuantumState::Density(m) => (0..n).any(|k| m[(s * n + k, s * n + k)].re > 0.0),
            };
        }
        out
    }

    /// Applies a 9×9 spin unitary, identity on the mode.
    pub fn apply_spin_unitary(&mut self, r: &CMat) {
        let n = self.fock_dim;
        match &mut self.state {
            QuantumState::Ket(v) => {
                let full = r.kronecker(&CMat::identity(n, n));
                *v = &full * &*v;
            }
            QuantumState::Density(m) => {
                // Block-wise R X R†; pulse unitaries are sparse in the spin basis.
                let mut tmp = CMat::zeros(m.nrows(), m.ncols());
                for s in 0..SPIN_DIM {
                    for k in (0..SPIN_DIM).filter(|&k| r[(s, k)] != C64::default()) {
                        let w = r[(s, k)];
                        for t in 0..SPIN_DIM {
                            let src = m.view((k * n, t * n), (n, n));
                            tmp.view_mut((s * n, t * n), (n, n)).zip_apply(&src, |a, b| *a += w * b);
                        }
                    }
                }
                m.fill(C64::default());
                for t in 0..SPIN_DIM {
                    for k in (0..SPIN_DIM).filter(|&k| r[(t, k)] != C64::default()) {
                        let w = r[(t, k)].conj();
                        for s in 0..SPIN_DIM {
                            let src = tmp.view((s * n, k * n), (n, n));
                            m.view_mut((s * n, t * n), (n, n)).zip_apply(&src, |a, b| *a += w * b);
                        }
                    }
                }
            }
        }
    }

    /// Multiplies each spin sector by `e^{−iφ_s}`.
    pub fn apply_spin_phases(&mut self, phases: &[f64; SPIN_DIM]) {
        let n = self.fock_dim;
        let f: Vec<C64> = phases.iter().map(|&p| C64::from_polar(1.0, -p)).collect();
        match &mut self.state {
            QuantumState::Ket(v) => {
                for s in 0..SPIN_DIM {
                    v.rows_mut(s * n, n).iter_mut().for_each(|z| *z *= f[s]);
                }
            }
            QuantumState::Density(m) => {
                for s in 0..SPIN_DIM {
                    for t in 0..SPIN_DIM {
                        let w = f[s] * f[t].conj();
                        m.view_mut((s * n, t * n), (n, n)).iter_mut().for_each(|z| *z *= w);
                    }
                }
            }
        }
    }

    /// Motional dissipation for time `t` on every block.
    pub fn dissipate(&mut self, diss: &MotionalDissipator, t: f64) -> Result<()> {
        if diss.is_trivial() || t <= 0.0 {
            return Ok(());
        }
        self.make_density();
        let n = self.fock_dim;
        let active = self.active();
        if let QuantumState::Density(m) = &mut self.state {
            for s in (0..SPIN_DIM).filter(|&s| active[s]) {
                for t_ in (0..SPIN_DIM).filter(|&t_| active[t_]) {
                    let mut block = m.view((s * n, t_ * n), (n, n)).into_owned();
                    diss.apply(&mut block, t);
                    m.view_mut((s * n, t_ * n), (n, n)).copy_from(&block);
                }
            }
        }
        Ok(())
    }

    /// Forced-oscillator propagators `e^{−iΘ}D(α)` per force eigenvalue over
    /// `[0, h]` measured from the drive phase reference.
    fn base_unitaries(&self, step: &ForceStep, h: f64) -> Vec<Option<CMat>> {
        let n = self.fock_dim;
        let active = self.active();
        let mut unitaries: Vec<Option<CMat>> = vec![None; SPIN_DIM];
        let mut cache: Vec<(f64, CMat)> = Vec::new();
        for s in (0..SPIN_DIM).filter(|&s| active[s]) {
            let lambda = force_eigenvalue(s);
            if lambda == 0.0 {
                continue;
            }
            if let Some((_, u)) = cache.iter().find(|(l, _)| *l == lambda) {
                unitaries[s] = Some(u.clone());
                continue;
            }
            let tr = segment_trajectory(step.g, step.big_delta, lambda, step.phase, 0.0, h);
            let u = displacement(tr.alpha, n) * C64::from_polar(1.0, -tr.theta);
            cache.push((lambda, u.clone()));
            unitaries[s] = Some(u);
        }
        unitaries
    }

    /// Applies the base propagators shifted to start at `t0`: a later start
    /// only rotates α by `e^{−iΔt0}`, i.e. conjugates by `e^{−iΔt0·a†a}`.
    fn apply_shifted(&mut self, base: &[Option<CMat>], big_delta: f64, t0: f64) {
        let n = self.fock_dim;
        let rot: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, -big_delta * t0 * k as f64)).collect();
        let unitaries: Vec<Option<CMat>> = base
            .iter()
            .map(|u| {
                u.as_ref().map(|u| {
                    if t0 == 0.0 {
                        return u.clone();
                    }
                    CMat::from_fn(n, n, |r, c| u[(r, c)] * rot[r] * rot[c].conj())
                })
            })
            .collect();
        match &mut self.state {
            QuantumState::Ket(v) => {
                for (s, u) in unitaries.iter().enumerate() {
                    if let Some(u) = u {
                        let block = u * v.rows(s * n, n);
                        v.rows_mut(s * n, n).copy_from(&block);
                    }
                }
            }
            QuantumState::Density(m) => {
                for s in 0..SPIN_DIM {
                    for t in 0..SPIN_DIM {
                        if unitaries[s].is_none() && unitaries[t].is_none() {
                            continue;
                        }
                        let mut block = m.view((s * n, t * n), (n, n)).into_owned();
                        if let Some(u) = &unitaries[s] {
                            block = u * block;
                        }
                        if let Some(u) = &unitaries[t] {
                            block *= u.adjoint();
                        }
                        m.view_mut((s * n, t * n), (n, n)).copy_from(&block);
                    }
                }
            }
        }
    }

    /// Force segment with optional dissipation, split into `substeps` Strang steps.
    pub fn apply_force(&mut self, step: &ForceStep, diss: Option<&MotionalDissipator>, substeps: usize) -> Result<()> {
        if step.duration < 0.0 {
            return Err(Error::InvalidParameter("negative segment duration".into()));
        }
        match diss {
            Some(d) if !d.is_trivial() => {
                self.make_density();
                let m = substeps.max(1);
                let h = step.duration / m as f64;
                let base = self.base_unitaries(step, h);
                for k in 0..m {
                    self.dissipate(d, 0.5 * h)?;
                    self.apply_shifted(&base, step.big_delta, k as f64 * h);
                    self.dissipate(d, 0.5 * h)?;
                }
            }
            _ => {
                let base = self.base_unitaries(step, step.duration);
                self.apply_shifted(&base, step.big_delta, 0.0);
            }
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        self.state.trace()
    }
}
