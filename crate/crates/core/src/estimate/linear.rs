//! Linear fidelity estimator with variance-optimal coefficients.
//!
//! The estimate is `F̂ = Σ_j Σ_i α_i^{(j)} C_i^{(j)} / n^{(j)}`, where the
//! coefficients satisfy
//! `Σ α_i^{(j)} Π_i^{(j)} = |ψ⟩⟨ψ| + A X_A + B X_B + C X_C` with
//! `X_A = |↑a⟩⟨↑a| + |a↑⟩⟨a↑|`, `X_B = |↓a⟩⟨↓a| + |a↓⟩⟨a↓|` and
//! `X_C = |aa⟩⟨aa|`. The variance at `ρ = |ψ⟩⟨ψ|` is minimised.
//!
//! Because `Π_i^{(j)} = Σ_b P_b(i) E_b^{(j)}`, the constraint only sees
//! `β^{(j)} = M α^{(j)}` with `M_{bi} = P_b(i)`. For fixed `β` the smallest
//! per-setting variance is `βᵀG⁻¹β − (wᵀβ)²` with `G = M D⁻¹ Mᵀ`,
//! `D = diag(p)` and `w_b = ⟨ψ|E_b|ψ⟩`, reached by `α = D⁻¹MᵀG⁻¹β`. The
//! program is therefore solved over the three `β` per setting plus `A, B, C`
//! through its KKT system.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::states::TargetState;
use crate::detect::{Analysis, CountHistogram, PovmSet};
use crate::hilbert::{basis_ket, CMat, Level, SPIN_DIM};
use crate::{Error, Result};

/// Added to outcome probabilities before inversion.
pub const PROBABILITY_FLOOR: f64 = 1e-12;
/// Relative ridge on the QP Hessian.
pub const RIDGE: f64 = 1e-12;
pub const CONSTRAINT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearCoeffs {
    pub target: TargetState,
    pub settings: Vec<Analysis>,
    /// Trials per setting the coefficients were optimised for.
    pub trials: Vec<f64>,
    /// `alpha[j][i]`: coefficient of count `i` in setting `j`.
    pub alpha: Vec<Vec<f64>>,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Estimator variance at the target state.
    pub variance: f64,
    /// Operator-norm residual of the constraint.
    pub residual: f64,
}

fn proj(a: Level, b: Level) -> CMat {
    let v = basis_ket(a, b);
    &v * v.adjoint()
}

/// Leakage operators `X_A`, `X_B`, `X_C`.
pub fn leak_operators() -> [CMat; 3] {
    [
        proj(Level::Up, Level::Leak) + proj(Level::Leak, Level::Up),
        proj(Level::Down, Level::Leak) + proj(Level::Leak, Level::Down),
        proj(Level::Leak, Level::Leak),
    ]
}

/// Real coordinates of a Hermitian matrix: Re on and above the diagonal,
/// Im strictly above.
fn hermitian_coords(m: &CMat) -> Vec<f64> {
    let mut out = Vec::with_capacity(SPIN_DIM * SPIN_DIM);
    for i in 0..SPIN_DIM {
        for j in i..SPIN_DIM {
            out.push(m[(i, j)].re);
        }
    }
    for i in 0..SPIN_DIM {
        for j in i + 1..SPIN_DIM {
            out.push(m[(i, j)].im);
        }
    }
    out
}

fn spectral_norm(m: &CMat) -> f64 {
    let h = m.adjoint() * m;
    h.symmetric_eigenvalues().iter().cloned().fold(0.0f64, f64::max).sqrt()
}

struct SettingBlock {
    /// `M`, 3 × n_bins.
    m: DMatrix<f64>,
    d: DVector<f64>,
    g_inv: Matrix3<f64>,
    w: Vector3<f64>,
}

fn setting_block(povm: &PovmSet, psi_proj: &CMat) -> Result<SettingBlock> {
    let n = povm.n_outcomes();
    let m = DMatrix::from_fn(3, n, |b, i| povm.pmfs.pmf[b][i]);
    let wv = povm.bright_weights(psi_proj);
    let w = Vector3::new(wv[0], wv[1], wv[2]);
    let d = DVector::from_fn(n, |i, _| wv[0] * m[(0, i)] + wv[1] * m[(1, i)] + wv[2] * m[(2, i)] + PROBABILITY_FLOOR);
    let mut g = Matrix3::zeros();
    for i in 0..n {
        let inv = 1.0 / d[i];
        for a in 0..3 {
            for b in 0..3 {
                g[(a, b)] += m[(a, i)] * m[(b, i)] * inv;
            }
        }
    }
    let g_inv = g.try_inverse().ok_or_else(|| Error::EstimationFailed("reference distributions are linearly dependent".into()))?;
    Ok(SettingBlock { m, d, g_inv, w })
}

/// The constraint part of the program, which depends only on the analysis
/// settings: a particular solution and a null-space basis in `β`-space.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub target: TargetState,
    pub settings: Vec<Analysis>,
    projectors: Vec<[CMat; 3]>,
    particular: DVector<f64>,
    null_space: DMatrix<f64>,
}

impl LinearProgram {
    pub fn new(settings: &[Analysis], target: TargetState) -> Result<Self> {
        if settings.is_empty() {
            return Err(Error::InvalidParameter("no measurement settings".into()));
        }
        let projectors: Vec<[CMat; 3]> = settings.iter().map(|&a| crate::detect::bright_projectors(a)).collect();
        let leak = leak_operators();
        let nj = settings.len();
        let nv = 3 * nj + 3;
        let nc = SPIN_DIM * SPIN_DIM;
        let mut k = DMatrix::<f64>::zeros(nc, nv);
        for (j, e) in projectors.iter().enumerate() {
            for b in 0..3 {
                k.set_column(3 * j + b, &DVector::from_vec(hermitian_coords(&e[b])));
            }
        }
        for (l, x) in leak.iter().enumerate() {
            k.set_column(3 * nj + l, &(-DVector::from_vec(hermitian_coords(x))));
        }
        let rhs = DVector::from_vec(hermitian_coords(&target.projector()));

        // Thin SVD of Kᵀ gives orthonormal bases of the row space and, via
        // its complement, the null space of K.
        let full = k.transpose().svd(true, true);
        let smax = full.singular_values.max();
        let rank = full.singular_values.iter().filter(|&&v| v > 1e-10 * smax).count();
        let v_row = full.u.as_ref().expect("requested U");
        let u_col = full.v_t.as_ref().expect("requested Vᵀ").transpose();
        let mut order: Vec<usize> = (0..full.singular_values.len()).collect();
        order.sort_by(|&a, &b| full.singular_values[b].total_cmp(&full.singular_values[a]));
        let keep = &order[..rank];
        let mut particular = DVector::<f64>::zeros(nv);
        let mut projected = DVector::<f64>::zeros(nc);
        for &i in keep {
            let ui = u_col.column(i);
            let coef = ui.dot(&rhs);
            projected += ui * coef;
            particular += v_row.column(i) * (coef / full.singular_values[i]);
        }
        let residual = (&rhs - &projected).norm();
        if residual > CONSTRAINT_TOLERANCE {
            return Err(Error::Infeasible { residual });
        }
        // Complete the row-space basis to all of R^nv.
        let row_basis = DMatrix::from_fn(nv, rank, |r, c| v_row[(r, keep[c])]);
        let complement = DMatrix::<f64>::identity(nv, nv) - &row_basis * row_basis.transpose();
        let csvd = complement.svd(true, false);
        let cu = csvd.u.as_ref().expect("requested U");
        let null_cols: Vec<usize> = (0..csvd.singular_values.len()).filter(|&i| csvd.singular_values[i] > 0.5).collect();
        let null_space = DMatrix::from_fn(nv, null_cols.len(), |r, c| cu[(r, null_cols[c])]);
        Ok(LinearProgram { target, settings: settings.to_vec(), projectors, particular, null_space })
    }

    /// Minimum-variance coefficients for `povms` (one per setting, same
    /// order) measured `trials[j]` times each.
    pub fn solve(&self, povms: &[PovmSet], trials: &[f64]) -> Result<LinearCoeffs> {
        let nj = self.settings.len();
        if povms.len() != nj || trials.len() != nj {
            return Err(Error::InvalidParameter("need one POVM and one trial count per setting".into()));
        }
        if trials.iter().any(|&n| !(n > 0.0)) {
            return Err(Error::InvalidParameter("trial counts must be positive".into()));
        }
        let psi_proj = self.target.projector();
        let blocks: Vec<SettingBlock> = povms.iter().map(|p| setting_block(p, &psi_proj)).collect::<Result<_>>()?;
        let hblocks: Vec<Matrix3<f64>> = blocks.iter().zip(trials).map(|(b, n)| (b.g_inv - b.w * b.w.transpose()) / *n).collect();
        let scale = hblocks.iter().flat_map(|h| (0..3).map(move |i| h[(i, i)])).fold(0.0f64, f64::max).max(1e-300);
        let ridge = RIDGE * scale;
        let apply_h = |x: &DVector<f64>| -> DVector<f64> {
            let mut y = x * ridge;
            for (j, h) in hblocks.iter().enumerate() {
                let v = h * Vector3::new(x[3 * j], x[3 * j + 1], x[3 * j + 2]);
                for a in 0..3 {
                    y[3 * j + a] += v[a];
                }
            }
            y
        };
        let n = &self.null_space;
        let hn = DMatrix::from_columns(&(0..n.ncols()).map(|c| apply_h(&n.column(c).into_owned())).collect::<Vec<_>>());
        let reduced = n.transpose() * &hn;
        let g = -(n.transpose() * apply_h(&self.particular));
        let z = match reduced.clone().cholesky() {
            Some(ch) => ch.solve(&g),
            None => reduced.lu().solve(&g).ok_or_else(|| Error::EstimationFailed("reduced QP is singular".into()))?,
        };
        let x = &self.particular + n * z;

        let leak = leak_operators();
        let mut alpha = Vec::with_capacity(nj);
        let mut variance = 0.0;
        let mut op = CMat::zeros(SPIN_DIM, SPIN_DIM);
        for (j, blk) in blocks.iter().enumerate() {
            let beta = Vector3::new(x[3 * j], x[3 * j + 1], x[3 * j + 2]);
            let lam = blk.g_inv * beta;
            let a: Vec<f64> =
                (0..blk.m.ncols()).map(|i| (blk.m[(0, i)] * lam[0] + blk.m[(1, i)] * lam[1] + blk.m[(2, i)] * lam[2]) / blk.d[i]).collect();
            variance += (beta.dot(&lam) - blk.w.dot(&beta).powi(2)) / trials[j];
            for b in 0..3 {
                let bb: f64 = (0..a.len()).map(|i| a[i] * blk.m[(b, i)]).sum();
                op += &self.projectors[j][b] * crate::hilbert::cr(bb);
            }
            alpha.push(a);
        }
        let (ca, cb, cc) = (x[3 * nj], x[3 * nj + 1], x[3 * nj + 2]);
        let target_op =
            &psi_proj + &leak[0] * crate::hilbert::cr(ca) + &leak[1] * crate::hilbert::cr(cb) + &leak[2] * crate::hilbert::cr(cc);
        let residual = spectral_norm(&(op - target_op));
        if residual > CONSTRAINT_TOLERANCE {
            return Err(Error::Infeasible { residual });
        }
        Ok(LinearCoeffs {
            target: self.target,
            settings: self.settings.clone(),
            trials: trials.to_vec(),
            alpha,
            a: ca,
            b: cb,
            c: cc,
            variance,
            residual,
        })
    }
}

/// Minimum-variance coefficients for `povms` measured `trials[j]` times each.
pub fn linear_coeffs(povms: &[PovmSet], trials: &[f64], target: TargetState) -> Result<LinearCoeffs> {
    if povms.len() != trials.len() || povms.is_empty() {
        return Err(Error::InvalidParameter("need one trial count per POVM setting".into()));
    }
    let settings: Vec<Analysis> = povms.iter().map(|p| p.analysis).collect();
    LinearProgram::new(&settings, target)?.solve(povms, trials)
}

/// Leakage occupancies `(⟨X_A⟩, ⟨X_B⟩, ⟨X_C⟩)` assumed for gate outputs.
pub fn leak_occupancies(eps: f64, target: TargetState) -> [f64; 3] {
    let single = eps * (1.0 - eps);
    match target {
        TargetState::Symmetric => [2.0 * single, 0.0, eps * eps],
        TargetState::Antisymmetric => [single, single, eps * eps],
    }
}

/// `Σ α C / n` over settings with their pooled histograms.
pub fn linear_raw(settings: &[(Analysis, CountHistogram)], coeffs: &LinearCoeffs) -> Result<f64> {
    if settings.len() != coeffs.settings.len() {
        return Err(Error::SettingsMismatch(format!("dataset has {} settings, coefficients {}", settings.len(), coeffs.settings.len())));
    }
    let mut total = 0.0;
    for (j, (analysis, h)) in settings.iter().enumerate() {
        let same = match (analysis, &coeffs.settings[j]) {
            (Analysis::None, Analysis::None) => true,
            (Analysis::Pi2 { phase: a }, Analysis::Pi2 { phase: b }) => (a - b).abs() < 1e-9,
            _ => false,
        };
        if !same || h.n_bins() != coeffs.alpha[j].len() {
            return Err(Error::SettingsMismatch(format!("setting {j} differs from the coefficients")));
        }
        if h.n_trials == 0 {
            return Err(Error::EstimationFailed(format!("setting {j} has no trials")));
        }
        let s: f64 = h.bins.iter().zip(&coeffs.alpha[j]).map(|(&c, a)| c as f64 * a).sum();
        total += s / h.n_trials as f64;
    }
    Ok(total)
}

/// Leakage-corrected linear estimate from raw sum `raw`.
pub fn linear_correct(raw: f64, coeffs: &LinearCoeffs, eps: f64) -> f64 {
    let occ = leak_occupancies(eps, coeffs.target);
    let f_rho = raw - coeffs.a * occ[0] - coeffs.b * occ[1] - coeffs.c * occ[2];
    f_rho / (1.0 - eps).powi(2)
}

/// Linear estimate of a dataset given matching coefficients.
pub fn linear_fidelity(dataset: &Dataset, coeffs: &LinearCoeffs, eps: f64) -> Result<f64> {
    if dataset.target != coeffs.target {
        return Err(Error::SettingsMismatch("coefficients were built for the other target state".into()));
    }
    Ok(linear_correct(linear_raw(&dataset.settings()?, coeffs)?, coeffs, eps))
}

/// Builds coefficients for the dataset's settings from POVMs supplied by
/// `povm_of`, reusing `program` when it matches those settings.
pub fn coeffs_for_dataset<F: Fn(Analysis) -> PovmSet>(
    dataset: &Dataset,
    povm_of: F,
    program: Option<&LinearProgram>,
) -> Result<(Vec<(Analysis, CountHistogram)>, LinearCoeffs)> {
    let settings = dataset.settings()?;
    let povms: Vec<PovmSet> = settings.iter().map(|(a, _)| povm_of(*a)).collect();
    let trials: Vec<f64> = settings.iter().map(|(_, h)| h.n_trials as f64).collect();
    let analyses: Vec<Analysis> = settings.iter().map(|(a, _)| *a).collect();
    let coeffs = match program {
        Some(p) if p.settings == analyses && p.target == dataset.target => p.solve(&povms, &trials)?,
        _ => LinearProgram::new(&analyses, dataset.target)?.solve(&povms, &trials)?,
    };
    Ok((settings, coeffs))
}
