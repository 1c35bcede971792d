use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ensemble::Ensemble;
use crate::error::{QbcError, Result};
use crate::qcore::{polar_unitary, trace_norm, CMatrix, CVector, DensityOp, Ket};

/// Which transform of the polar unitary `U` is used as the mixing matrix `V`
/// of the tilde ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Direct,
    Transpose,
    Conjugate,
    Adjoint,
}

impl Orientation {
    pub const ALL: [Orientation; 4] =
        [Orientation::Direct, Orientation::Transpose, Orientation::Conjugate, Orientation::Adjoint];

    pub fn apply(self, u: &CMatrix) -> CMatrix {
        match self {
            Orientation::Direct => u.clone(),
            Orientation::Transpose => u.transpose(),
            Orientation::Conjugate => u.conjugate(),
            Orientation::Adjoint => u.adjoint(),
        }
    }
}

/// One state of the ensemble Adam steers Babe's share into by measuring his
/// half in the rotated basis. `state` is `None` when the branch has zero
/// weight.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeState {
    pub prob: f64,
    pub state: Option<Ket>,
}

/// Overlap-optimal cheat for a pair of commitment ensembles.
#[derive(Debug, Clone)]
pub struct CheatSolution {
    /// `Λ_ij = √(p'_i p_j)⟨φ'_i|φ_j⟩`, padded to a square matrix.
    pub lambda: CMatrix,
    pub abs_lambda: CMatrix,
    /// Polar unitary with `Λ·U = |Λ|`.
    pub cheat_u: CMatrix,
    /// Mixing matrix actually used for the tilde ensemble.
    pub mix_v: CMatrix,
    pub orientation: Orientation,
    /// `tr|Λ|`, equal to the fidelity of the two reduced states.
    pub fid: f64,
    /// Cheating probability achieved with `mix_v`.
    pub p_ac: f64,
    /// `Σ_i (|Λ|_ii)²`, kept for comparison only.
    pub diag_square_sum: f64,
    /// `max |Λ·U − |Λ||`.
    pub polar_residual: f64,
    /// `|tr(Λ·U)|`.
    pub overlap: f64,
    /// Cheating probability for each orientation candidate.
    pub candidates: Vec<(Orientation, f64)>,
    pub tilde_states: Vec<TildeState>,
}

struct Padded {
    size: usize,
    /// `G_ij = ⟨φ'_i|φ_j⟩`, zero outside the real entries.
    gram: CMatrix,
    sqrt_p0: Vec<f64>,
    sqrt_p1: Vec<f64>,
}

fn pad(e0: &Ensemble, e1: &Ensemble) -> Result<Padded> {
    if e0.dims() != e1.dims() {
        return Err(QbcError::Dimension(format!("ensembles on dims {:?} and {:?}", e0.dims(), e1.dims())));
    }
    let size = e0.len().max(e1.len());
    let mut gram = CMatrix::zeros(size, size);
    for (i, (_, b)) in e1.entries().iter().enumerate() {
        for (j, (_, a)) in e0.entries().iter().enumerate() {
            gram[(i, j)] = b.inner(a);
        }
    }
    let mut sqrt_p0: Vec<f64> = e0.entries().iter().map(|(p, _)| p.sqrt()).collect();
    let mut sqrt_p1: Vec<f64> = e1.entries().iter().map(|(p, _)| p.sqrt()).collect();
    sqrt_p0.resize(size, 0.0);
    sqrt_p1.resize(size, 0.0);
    Ok(Padded { size, gram, sqrt_p0, sqrt_p1 })
}

/// Cross-Gram matrix `Λ_ij = √(p'_i p_j)⟨φ'_i|φ_j⟩` with `e0 = {p_j, φ_j}`
/// and `e1 = {p'_i, φ'_i}`. The smaller ensemble is padded with zero-weight
/// entries so the result is square.
pub fn build_lambda(e0: &Ensemble, e1: &Ensemble) -> Result<CMatrix> {
    let pd = pad(e0, e1)?;
    Ok(CMatrix::from_fn(pd.size, pd.size, |i, j| pd.gram[(i, j)] * (pd.sqrt_p1[i] * pd.sqrt_p0[j])))
}

fn success_padded(pd: &Padded, v: &CMatrix) -> f64 {
    // Σ_i |Σ_j √p_j V_ji ⟨φ'_i|φ_j⟩|²
    (0..pd.size)
        .map(|i| (0..pd.size).map(|j| pd.gram[(i, j)] * v[(j, i)] * pd.sqrt_p0[j]).sum::<Complex64>().norm_sqr())
        .sum()
}

fn check_mixing(v: &CMatrix, size: usize) -> Result<()> {
    if v.nrows() != size || v.ncols() != size {
        return Err(QbcError::Dimension(format!(
            "mixing matrix {}x{} for padded ensemble size {size}",
            v.nrows(),
            v.ncols()
        )));
    }
    let err = crate::qcore::unitarity_error(v);
    if err > 1e-6 {
        return Err(QbcError::invariant("cheat.unitary", format!("‖V†V − I‖_F = {err}")));
    }
    Ok(())
}

/// Probability that Adam, committed to `e0`, opens `e1` successfully after
/// measuring his half in the basis rotated by `v`: with
/// `√p̃_i|φ̃_i⟩ = Σ_j √p_j V_ji |φ_j⟩` this is `Σ_i p̃_i |⟨φ̃_i|φ'_i⟩|²`.
pub fn cheat_success(e0: &Ensemble, e1: &Ensemble, v: &CMatrix) -> Result<f64> {
    let pd = pad(e0, e1)?;
    check_mixing(v, pd.size)?;
    Ok(success_padded(&pd, v))
}

/// The tilde ensemble produced by mixing matrix `v` from `e0`.
pub fn tilde_ensemble(e0: &Ensemble, v: &CMatrix) -> Result<Vec<TildeState>> {
    let size = v.nrows();
    if size < e0.len() {
        return Err(QbcError::Dimension("mixing matrix smaller than ensemble".into()));
    }
    let d = e0.state_dim();
    let dims = e0.dims().to_vec();
    Ok((0..size)
        .map(|i| {
            let mut acc = CVector::zeros(d);
            for (j, (p, phi)) in e0.entries().iter().enumerate() {
                acc += phi.amplitudes() * (v[(j, i)] * p.sqrt());
            }
            let prob = acc.norm_squared();
            let state = if prob > 1e-24 { Ket::normalized(acc, dims.clone()).ok() } else { None };
            TildeState { prob, state }
        })
        .collect())
}

/// Overlap-optimal cheat: the polar unitary of `Λ`, oriented to maximize the
/// achieved cheating probability.
pub fn optimal_overlap_cheat(e0: &Ensemble, e1: &Ensemble) -> Result<CheatSolution> {
    let pd = pad(e0, e1)?;
    let lambda = build_lambda(e0, e1)?;
    let (u, abs_lambda) = polar_unitary(&lambda)?;
    let fid = abs_lambda.trace().re;
    let polar_residual = (&lambda * &u - &abs_lambda).camax();
    let overlap = (&lambda * &u).trace().norm();

    let mut candidates = Vec::with_capacity(4);
    let mut best = (Orientation::Direct, f64::NEG_INFINITY);
    for o in Orientation::ALL {
        let p = success_padded(&pd, &o.apply(&u));
        candidates.push((o, p));
        if p > best.1 + 1e-15 {
            best = (o, p);
        }
    }
    let mix_v = best.0.apply(&u);
    let diag_square_sum = (0..pd.size).map(|i| abs_lambda[(i, i)].re.powi(2)).sum();
    let tilde_states = tilde_ensemble(e0, &mix_v)?;
    Ok(CheatSolution {
        lambda,
        abs_lambda,
        cheat_u: u,
        mix_v,
        orientation: best.0,
        fid,
        p_ac: best.1,
        diag_square_sum,
        polar_residual,
        overlap,
        candidates,
        tilde_states,
    })
}

/// Optimal equal-prior guessing probability `¼(2 + ‖ρ0 − ρ1‖₁)`.
pub fn helstrom(rho0: &DensityOp, rho1: &DensityOp) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(QbcError::Dimension(format!("states of dimension {} and {}", rho0.dim(), rho1.dim())));
    }
    Ok(0.25 * (2.0 + trace_norm(&(rho0.matrix() - rho1.matrix()))?))
}
