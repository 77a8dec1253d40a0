//! State and operator algebra for two three-level ions and one motional mode.
//!
//! Each ion has the qubit levels |↓⟩, |↑⟩ and a leaked level |a⟩. The full
//! space is ion 1 ⊗ ion 2 ⊗ Fock(N) with basis index `(l1·3 + l2)·N + n`.
//!
//! Conventions, used consistently across the crate:
//! * `σ_z|↓⟩ = +|↓⟩`, `σ_z|↑⟩ = −|↑⟩`, `σ_z|a⟩ = 0`.
//! * In the qubit block (ordered ↓, ↑) `σ_x`, `σ_y` are the usual Pauli
//!   matrices, so `σ_+ = |↓⟩⟨↑|` and `σ_− = |↑⟩⟨↓|`.
//! * |a⟩ is untouched by every drive and reads out dark.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ION_LEVELS: usize = 3;
/// Dimension of the two-qutrit spin space.
pub const SPIN_DIM: usize = ION_LEVELS * ION_LEVELS;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Down = 0,
    Up = 1,
    Leak = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Down, Level::Up, Level::Leak];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Level {
        Self::ALL[i]
    }

    /// Eigenvalue of `σ_z` on this level.
    pub fn sigma_z(self) -> f64 {
        match self {
            Level::Down => 1.0,
            Level::Up => -1.0,
            Level::Leak => 0.0,
        }
    }

    /// Only |↓⟩ fluoresces during detection.
    pub fn is_bright(self) -> bool {
        self == Level::Down
    }
}

#[inline]
pub fn spin_index(l1: Level, l2: Level) -> usize {
    l1.index() * ION_LEVELS + l2.index()
}

#[inline]
pub fn spin_levels(s: usize) -> (Level, Level) {
    (Level::from_index(s / ION_LEVELS), Level::from_index(s % ION_LEVELS))
}

/// Eigenvalue of `σ_z1 − σ_z2` on the two-qutrit basis state `s`.
#[inline]
pub fn force_eigenvalue(s: usize) -> f64 {
    let (a, b) = spin_levels(s);
    a.sigma_z() - b.sigma_z()
}

/// Number of ions in |↓⟩ for the basis state `s`.
#[inline]
pub fn bright_count(s: usize) -> usize {
    let (a, b) = spin_levels(s);
    a.is_bright() as usize + b.is_bright() as usize
}

/// Fock truncation of the motional mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertSpec {
    pub fock_dim: usize,
}

impl HilbertSpec {
    pub const DEFAULT_FOCK_DIM: usize = 16;

    pub fn new(fock_dim: usize) -> Result<Self> {
        let spec = HilbertSpec { fock_dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fock_dim < 2 {
            return Err(Error::InvalidSpec(format!("fock_dim must be at least 2, got {}", self.fock_dim)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        SPIN_DIM * self.fock_dim
    }

    pub fn index(&self, l1: Level, l2: Level, n: usize) -> usize {
        spin_index(l1, l2) * self.fock_dim + n
    }

    pub fn doubled(&self) -> Self {
        HilbertSpec { fock_dim: 2 * self.fock_dim }
    }
}

impl Default for HilbertSpec {
    fn default() -> Self {
        HilbertSpec { fock_dim: Self::DEFAULT_FOCK_DIM }
    }
}

/// A pure ket or a density operator.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Ket(CVec),
    Density(CMat),
}

pub const NORM_TOL: f64 = 1e-12;
pub const EIGEN_TOL: f64 = 1e-10;

impl QuantumState {
    /// A normalised ket; fails if `‖ψ‖ ≠ 1` to within 1e-12.
    pub fn ket(v: CVec) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("ket norm {n} differs from 1")));
        }
        Ok(QuantumState::Ket(v))
    }

    /// Normalises `v` before wrapping it.
    pub fn ket_normalized(v: CVec) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::InvalidParameter("zero vector".into()));
        }
        Ok(QuantumState::Ket(v / cr(n)))
    }

    /// A density operator, checked for Hermiticity, unit trace and positivity.
    pub fn density(m: CMat) -> Result<Self> {
        check_density(&m, NORM_TOL, EIGEN_TOL)?;
        Ok(QuantumState::Density(m))
    }

    /// Wraps a density operator without validation (for trusted internal results).
    pub fn density_unchecked(m: CMat) -> Self {
        QuantumState::Density(m)
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Ket(v) => v.len(),
            QuantumState::Density(m) => m.nrows(),
        }
    }

    pub fn is_pure_ket(&self) -> bool {
        matches!(self, QuantumState::Ket(_))
    }

    pub fn to_density(&self) -> CMat {
        match self {
            QuantumState::Ket(v) => v * v.adjoint(),
            QuantumState::Density(m) => m.clone(),
        }
    }

    pub fn into_density(self) -> CMat {
        match self {
            QuantumState::Ket(v) => &v * v.adjoint(),
            QuantumState::Density(m) => m,
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            QuantumState::Ket(v) => v.norm_squared(),
            QuantumState::Density(m) => m.trace().re,
        }
    }

    pub fn purity(&self) -> f64 {
        match self {
            QuantumState::Ket(v) => v.norm_squared().powi(2),
            QuantumState::Density(m) => (m * m).trace().re,
        }
    }

    /// Applies `U·|ψ⟩` or `U·ρ·U†`.
    pub fn evolve(&self, u: &CMat) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.nrows() });
        }
        Ok(match self {
            QuantumState::Ket(v) => QuantumState::Ket(u * v),
            QuantumState::Density(m) => QuantumState::Density(u * m * u.adjoint()),
        })
    }
}

/// Hermiticity, trace and eigenvalue checks for a density operator.
pub fn check_density(m: &CMat, trace_tol: f64, eig_tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    let herm = (m - m.adjoint()).norm();
    if herm > trace_tol.max(1e-12) * m.nrows() as f64 {
        return Err(Error::InvalidParameter(format!("density operator not Hermitian ({herm:e})")));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
        return Err(Error::InvalidParameter(format!("density operator trace {tr} differs from 1")));
    }
    let h = (m + m.adjoint()) * cr(0.5);
    let min = h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -eig_tol {
        return Err(Error::InvalidParameter(format!("density operator has eigenvalue {min:e}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Single-ion operators (3×3, basis ↓, ↑, a)

pub fn ion_sigma_z() -> CMat {
    CMat::from_diagonal(&CVec::from_vec(vec![cr(1.0), cr(-1.0), cr(0.0)]))
}

pub fn ion_sigma_plus() -> CMat {
    let mut m = CMat::zeros(3, 3);
    m[(0, 1)] = cr(1.0);
    m
}

pub fn ion_sigma_minus() -> CMat {
    ion_sigma_plus().adjoint()
}

pub fn ion_sigma_x() -> CMat {
    ion_sigma_plus() + ion_sigma_minus()
}

pub fn ion_sigma_y() -> CMat {
    let mut m = CMat::zeros(3, 3);
    m[(0, 1)] = c(0.0, -1.0);
    m[(1, 0)] = c(0.0, 1.0);
    m
}

/// Projector onto the qubit subspace {|↓⟩, |↑⟩}.
pub fn ion_qubit_projector() -> CMat {
    CMat::from_diagonal(&CVec::from_vec(vec![cr(1.0), cr(1.0), cr(0.0)]))
}

/// `exp(−iθ/2 (cos φ σ_x + sin φ σ_y))` on the qubit block, identity on |a⟩.
pub fn ion_rotation(theta: f64, phi: f64) -> CMat {
    let (s, co) = (0.5 * theta).sin_cos();
    let mut m = CMat::identity(3, 3);
    m[(0, 0)] = cr(co);
    m[(1, 1)] = cr(co);
    // −i sin(θ/2) (cos φ σx + sin φ σy): off-diagonals −i s e^{∓iφ}
    m[(0, 1)] = c(0.0, -s) * C64::from_polar(1.0, -phi);
    m[(1, 0)] = c(0.0, -s) * C64::from_polar(1.0, phi);
    m
}

/// `exp(−iθ σ_z / 2)` on the qubit block, identity on |a⟩.
pub fn ion_z_rotation(theta: f64) -> CMat {
    let mut m = CMat::identity(3, 3);
    m[(0, 0)] = C64::from_polar(1.0, -0.5 * theta);
    m[(1, 1)] = C64::from_polar(1.0, 0.5 * theta);
    m
}

/// Two-qutrit operator `op1 ⊗ op2` (9×9).
pub fn spin_op(op1: &CMat, op2: &CMat) -> CMat {
    op1.kronecker(op2)
}

/// The same single-ion rotation applied to both ions.
pub fn global_rotation(theta: f64, phi: f64) -> CMat {
    let r = ion_rotation(theta, phi);
    spin_op(&r, &r)
}

/// A rotation on one ion (`ion` ∈ {0, 1}) only.
pub fn single_ion_rotation(ion: usize, theta: f64, phi: f64) -> CMat {
    let r = ion_rotation(theta, phi);
    let id = CMat::identity(3, 3);
    if ion == 0 {
        spin_op(&r, &id)
    } else {
        spin_op(&id, &r)
    }
}

/// Motional annihilation operator truncated to `n` levels.
pub fn annihilation(n: usize) -> CMat {
    let mut a = CMat::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = cr((k as f64).sqrt());
    }
    a
}

/// Operators of the two-ion-plus-mode model, embedded in the full space.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub spec: HilbertSpec,
    pub sigma_z: [CMat; 2],
    pub sigma_plus: [CMat; 2],
    pub sigma_minus: [CMat; 2],
    pub a: CMat,
    pub a_dag: CMat,
}

impl OperatorSet {
    /// Embeds a 9×9 spin operator as `op ⊗ I_motion`.
    pub fn embed_spin(&self, op: &CMat) -> CMat {
        op.kronecker(&CMat::identity(self.spec.fock_dim, self.spec.fock_dim))
    }

    /// Embeds an N×N motional operator as `I_spin ⊗ op`.
    pub fn embed_motion(&self, op: &CMat) -> CMat {
        CMat::identity(SPIN_DIM, SPIN_DIM).kronecker(op)
    }

    /// `σ_z1 − σ_z2`.
    pub fn force_operator(&self) -> CMat {
        &self.sigma_z[0] - &self.sigma_z[1]
    }

    pub fn number(&self) -> CMat {
        &self.a_dag * &self.a
    }
}

pub fn build_operators(spec: HilbertSpec) -> Result<OperatorSet> {
    spec.validate()?;
    let n = spec.fock_dim;
    let id3 = CMat::identity(3, 3);
    let id_m = CMat::identity(n, n);
    let full = |op: CMat, ion: usize| -> CMat {
        let spin = if ion == 0 { spin_op(&op, &id3) } else { spin_op(&id3, &op) };
        spin.kronecker(&id_m)
    };
    let a_m = annihilation(n);
    let a = CMat::identity(SPIN_DIM, SPIN_DIM).kronecker(&a_m);
    let a_dag = a.adjoint();
    Ok(OperatorSet {
        spec,
        sigma_z: [full(ion_sigma_z(), 0), full(ion_sigma_z(), 1)],
        sigma_plus: [full(ion_sigma_plus(), 0), full(ion_sigma_plus(), 1)],
        sigma_minus: [full(ion_sigma_minus(), 0), full(ion_sigma_minus(), 1)],
        a,
        a_dag,
    })
}

/// `exp(−i·H·t)` for Hermitian `H`, via its eigendecomposition (exactly unitary).
pub fn expm_hermitian(h: &CMat, t: f64) -> CMat {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut vd = v.clone();
    for (j, &e) in eig.eigenvalues.iter().enumerate() {
        let ph = C64::from_polar(1.0, -e * t);
        vd.column_mut(j).iter_mut().for_each(|z| *z *= ph);
    }
    vd * v.adjoint()
}

/// Largest anti-Hermitian deviation `‖H − H†‖_F / 2`.
pub fn hermiticity_defect(h: &CMat) -> f64 {
    0.5 * (h - h.adjoint()).norm()
}

// ---------------------------------------------------------------------------
// Named states

/// Two-qutrit basis ket |l1 l2⟩.
pub fn basis_ket(l1: Level, l2: Level) -> CVec {
    let mut v = CVec::zeros(SPIN_DIM);
    v[spin_index(l1, l2)] = cr(1.0);
    v
}

/// |Φ⟩ = (|↓↓⟩ + i|↑↑⟩)/√2.
pub fn phi_bell() -> CVec {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    basis_ket(Level::Down, Level::Down) * cr(h) + basis_ket(Level::Up, Level::Up) * c(0.0, h)
}

/// |Ψ₋⟩ = (|↓↑⟩ − |↑↓⟩)/√2.
pub fn psi_minus_bell() -> CVec {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (basis_ket(Level::Down, Level::Up) - basis_ket(Level::Up, Level::Down)) * cr(h)
}

/// Initial two-ion state with leakage probability `eps` per ion:
/// `(1−ε)²|↓↓⟩⟨↓↓| + ε(1−ε)(|↓a⟩⟨↓a| + |a↓⟩⟨a↓|) + ε²|aa⟩⟨aa|`.
pub fn leaky_initial_state(eps: f64) -> CMat {
    let mut m = CMat::zeros(SPIN_DIM, SPIN_DIM);
    m[(spin_index(Level::Down, Level::Down), spin_index(Level::Down, Level::Down))] = cr((1.0 - eps).powi(2));
    m[(spin_index(Level::Down, Level::Leak), spin_index(Level::Down, Level::Leak))] = cr(eps * (1.0 - eps));
    m[(spin_index(Level::Leak, Level::Down), spin_index(Level::Leak, Level::Down))] = cr(eps * (1.0 - eps));
    m[(spin_index(Level::Leak, Level::Leak), spin_index(Level::Leak, Level::Leak))] = cr(eps * eps);
    m
}

/// Thermal motional state with mean occupation `nbar`, truncated and renormalised.
pub fn thermal_motion(nbar: f64, n: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    if nbar <= 0.0 {
        m[(0, 0)] = cr(1.0);
        return m;
    }
    let r = nbar / (1.0 + nbar);
    let weights: Vec<f64> = (0..n).map(|k| r.powi(k as i32)).collect();
    let z: f64 = weights.iter().sum();
    for (k, w) in weights.iter().enumerate() {
        m[(k, k)] = cr(w / z);
    }
    m
}

/// `ρ_spin ⊗ ρ_motion`.
pub fn tensor_spin_motion(spin: &CMat, motion: &CMat) -> CMat {
    spin.kronecker(motion)
}

/// `⟨ψ|ρ|ψ⟩` for a pure target.
pub fn state_fidelity(rho: &QuantumState, target: &QuantumState) -> Result<f64> {
    let psi = match target {
        QuantumState::Ket(v) => v,
        QuantumState::Density(_) => return Err(Error::InvalidParameter("fidelity target must be a pure ket".into())),
    };
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: psi.len(), got: rho.dim() });
    }
    let f = match rho {
        QuantumState::Ket(v) => C64::from(psi.dotc(v).norm_sqr()),
        QuantumState::Density(m) => psi.dotc(&(m * psi)),
    };
    debug_assert!(f.im.abs() < 1e-10);
    Ok(f.re.clamp(0.0, 1.0))
}

/// `⟨ψ|ρ|ψ⟩` on raw matrices, without clamping.
pub fn fidelity_raw(rho: &CMat, psi: &CVec) -> f64 {
    psi.dotc(&(rho * psi)).re
}

/// Traces out the motional mode, leaving a two-qutrit density operator.
pub fn partial_trace_motion(rho: &QuantumState, spec: &HilbertSpec) -> Result<QuantumState> {
    if rho.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: rho.dim() });
    }
    let n = spec.fock_dim;
    let mut out = CMat::zeros(SPIN_DIM, SPIN_DIM);
    match rho {
        QuantumState::Ket(v) => {
            for s in 0..SPIN_DIM {
                for t in 0..SPIN_DIM {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..n {
                        acc += v[s * n + k] * v[t * n + k].conj();
                    }
                    out[(s, t)] = acc;
                }
            }
        }
        QuantumState::Density(m) => {
            for s in 0..SPIN_DIM {
                for t in 0..SPIN_DIM {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..n {
                        acc += m[(s * n + k, t * n + k)];
                    }
                    out[(s, t)] = acc;
                }
            }
        }
    }
    Ok(QuantumState::Density(out))
}

/// Embeds a 4×4 qubit-pair operator (basis ↓↓, ↓↑, ↑↓, ↑↑) in the 9×9 two-qutrit space.
pub fn embed_qubit_pair(m4: &CMat) -> CMat {
    let map = [
        spin_index(Level::Down, Level::Down),
        spin_index(Level::Down, Level::Up),
        spin_index(Level::Up, Level::Down),
        spin_index(Level::Up, Level::Up),
    ];
    let mut out = CMat::zeros(SPIN_DIM, SPIN_DIM);
    for i in 0..4 {
        for j in 0..4 {
            out[(map[i], map[j])] = m4[(i, j)];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eigen_re(m: &CMat) -> Vec<f64> {
        let h = (m + m.adjoint()) * cr(0.5);
        let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().cloned().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn rejects_fock_dim_below_two() {
        assert!(HilbertSpec::new(1).is_err());
        assert!(build_operators(HilbertSpec { fock_dim: 1 }).is_err());
        assert_eq!(HilbertSpec::new(4).unwrap().dim(), 36);
    }

    #[test]
    fn minimal_ladder_has_number_eigenvalues_zero_one() {
        let a = annihilation(2);
        let ev = eigen_re(&(a.adjoint() * &a));
        assert!((ev[0] - 0.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn commutator_is_identity_below_cutoff() {
        let spec = HilbertSpec::new(6).unwrap();
        let ops = build_operators(spec).unwrap();
        let comm = &ops.a * &ops.a_dag - &ops.a_dag * &ops.a;
        for s in 0..SPIN_DIM {
            for k in 0..spec.fock_dim - 1 {
                let i = s * spec.fock_dim + k;
                assert!((comm[(i, i)] - cr(1.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn force_operator_eigenvalues_on_qubit_basis() {
        let spec = HilbertSpec::new(2).unwrap();
        let ops = build_operators(spec).unwrap();
        let f = ops.force_operator();
        let cases =
            [(Level::Down, Level::Down, 0.0), (Level::Down, Level::Up, 2.0), (Level::Up, Level::Down, -2.0), (Level::Up, Level::Up, 0.0)];
        for (l1, l2, ev) in cases {
            let i = spec.index(l1, l2, 0);
            assert!((f[(i, i)].re - ev).abs() < 1e-15);
            assert_eq!(force_eigenvalue(spin_index(l1, l2)), ev);
        }
    }

    #[test]
    fn sigma_z_annihilates_leak_level() {
        let spec = HilbertSpec::new(3).unwrap();
        let ops = build_operators(spec).unwrap();
        let mut v = CVec::zeros(spec.dim());
        v[spec.index(Level::Leak, Level::Down, 0)] = cr(1.0);
        assert!((&ops.sigma_z[0] * &v).norm() < 1e-15);
        assert!(((&ops.sigma_z[1] * &v) - &v).norm() < 1e-15);
    }

    #[test]
    fn sigma_z_squared_is_qubit_projector_and_factors_commute() {
        let spec = HilbertSpec::new(3).unwrap();
        let ops = build_operators(spec).unwrap();
        let sz2 = &ops.sigma_z[0] * &ops.sigma_z[0];
        let proj = ops.embed_spin(&spin_op(&ion_qubit_projector(), &CMat::identity(3, 3)));
        assert!((sz2 - proj).norm() < 1e-14);
        let pairs = [(&ops.sigma_plus[0], &ops.sigma_minus[1]), (&ops.sigma_z[0], &ops.a), (&ops.sigma_plus[1], &ops.a_dag)];
        for (x, y) in pairs {
            assert!((x * y - y * x).norm() < 1e-14);
        }
    }

    #[test]
    fn even_parity_qubits_are_force_free() {
        let spec = HilbertSpec::new(2).unwrap();
        let ops = build_operators(spec).unwrap();
        let f = ops.force_operator();
        for (l1, l2) in [(Level::Down, Level::Down), (Level::Up, Level::Up)] {
            let mut v = CVec::zeros(spec.dim());
            v[spec.index(l1, l2, 1)] = cr(1.0);
            assert!((&f * v).norm() < 1e-15);
        }
    }

    #[test]
    fn fidelity_examples() {
        let phi = QuantumState::ket(phi_bell()).unwrap();
        let rho = QuantumState::density(phi.to_density()).unwrap();
        assert!((state_fidelity(&rho, &phi).unwrap() - 1.0).abs() < 1e-14);
        let dd = QuantumState::Ket(basis_ket(Level::Down, Level::Down));
        assert!((state_fidelity(&dd, &phi).unwrap() - 0.5).abs() < 1e-14);

        let eps = 3.5e-3;
        let leaky = QuantumState::density(leaky_initial_state(eps)).unwrap();
        let f = state_fidelity(&leaky, &dd).unwrap();
        assert!((f - (1.0 - eps).powi(2)).abs() < 1e-14);
        assert!((f - 0.99301).abs() < 1e-5);

        let short = QuantumState::Ket(CVec::zeros(4));
        assert!(state_fidelity(&short, &phi).is_err());
    }

    #[test]
    fn partial_trace_of_product_and_entangled_states() {
        let spec = HilbertSpec::new(3).unwrap();
        let mut v = CVec::zeros(spec.dim());
        v[spec.index(Level::Down, Level::Down, 0)] = cr(1.0);
        let red = partial_trace_motion(&QuantumState::Ket(v), &spec).unwrap().to_density();
        let dd = spin_index(Level::Down, Level::Down);
        assert!((red[(dd, dd)] - cr(1.0)).norm() < 1e-15);
        assert!((red.trace() - cr(1.0)).norm() < 1e-15);

        // (|↓↓,0⟩ + |↑↑,1⟩)/√2 has a maximally mixed spin marginal on two states.
        let mut w = CVec::zeros(spec.dim());
        w[spec.index(Level::Down, Level::Down, 0)] = cr(std::f64::consts::FRAC_1_SQRT_2);
        w[spec.index(Level::Up, Level::Up, 1)] = cr(std::f64::consts::FRAC_1_SQRT_2);
        let red = partial_trace_motion(&QuantumState::Ket(w.clone()), &spec).unwrap();
        assert!((red.purity() - 0.5).abs() < 1e-14);
        let red2 = partial_trace_motion(&QuantumState::Density(&w * w.adjoint()), &spec).unwrap();
        assert!((red2.purity() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rotations_are_unitary_and_leave_leak_alone() {
        let r = ion_rotation(0.7, 1.1);
        assert!((&r * r.adjoint() - CMat::identity(3, 3)).norm() < 1e-14);
        assert_eq!(r[(2, 2)], cr(1.0));
        // π pulse about x maps |↓⟩ to −i|↑⟩.
        let x = ion_rotation(std::f64::consts::PI, 0.0);
        assert!((x[(1, 0)] - c(0.0, -1.0)).norm() < 1e-15);
        // Z rotation equals exp(−iθσz/2) as a rotation generated by σz.
        let z = ion_z_rotation(0.3);
        assert!((z[(0, 0)] - C64::from_polar(1.0, -0.15)).norm() < 1e-15);
    }

    #[test]
    fn thermal_state_has_requested_mean() {
        let m = thermal_motion(0.1, 30);
        let mean: f64 = (0..30).map(|k| k as f64 * m[(k, k)].re).sum();
        assert!((mean - 0.1).abs() < 1e-12);
    }
}
