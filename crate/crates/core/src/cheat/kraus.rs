use nalgebra::DVector;
use num_complex::Complex64;

use super::ensemble::Ensemble;
use crate::error::{QbcError, Result};
use crate::qcore::{haar_ket, polar_unitary, unitarity_error, CMatrix, DensityOp, Ket, VALIDATION_TOL};
use crate::rng::stream_from_seed;

/// A probability and a unitary: one term of a random-unitary channel
/// `ρ ↦ Σ p_i U_i ρ U_i†`.
pub type WeightedUnitary = (f64, CMatrix);

/// Largest allowed `‖AV − B‖_F` for the mixing-matrix solve.
pub const MIX_RESIDUAL_TOL: f64 = 1e-7;

/// Number of random inputs used to confirm the state relation.
pub const STATE_CHECKS: usize = 50;

const STATE_CHECK_SEED: u64 = 0x5eed_3232;

/// Outcome of comparing two random-unitary channels.
#[derive(Debug, Clone)]
pub struct KrausFreedomResult {
    pub equal: bool,
    /// `V` with `√p'_i U_1i = Σ_j √p_j V_ji U_0j`, when the channels agree.
    pub mix_v: Option<CMatrix>,
    /// Frobenius distance of the two process matrices.
    pub choi_distance: f64,
    /// `‖AV − B‖_F` of the operator relation, when solved.
    pub residual: Option<f64>,
    /// Largest violation of `√p'_i U_1i|ψ⟩ = Σ_j √p_j V_ji U_0j|ψ⟩` over
    /// Haar-random `ψ`, when solved.
    pub state_relation_error: Option<f64>,
}

/// Checks probabilities, shapes and unitarity; returns the operator dimension.
pub fn validate_ops(ops: &[WeightedUnitary]) -> Result<usize> {
    let Some((_, first)) = ops.first() else {
        return Err(QbcError::Empty("operator list"));
    };
    let d = first.nrows();
    let mut total = 0.0;
    for (p, u) in ops {
        if u.nrows() != d || u.ncols() != d {
            return Err(QbcError::Dimension(format!(
                "operator {}x{} in a list of {d}x{d} operators",
                u.nrows(),
                u.ncols()
            )));
        }
        let err = unitarity_error(u);
        if err > VALIDATION_TOL * (d as f64).max(1.0) * 10.0 {
            return Err(QbcError::invariant("ops.unitary", format!("‖U†U − I‖_F = {err}")));
        }
        if !(*p > 0.0 && *p <= 1.0 + VALIDATION_TOL) {
            return Err(QbcError::invariant("ops.probability_range", format!("probability {p} outside (0, 1]")));
        }
        total += p;
    }
    if (total - 1.0).abs() > VALIDATION_TOL {
        return Err(QbcError::invariant("ops.probabilities_sum", format!("probabilities sum to {total}")));
    }
    Ok(d)
}

fn vec_op(u: &CMatrix) -> DVector<Complex64> {
    DVector::from_column_slice(u.as_slice())
}

/// Process matrix `Σ p_i vec(U_i) vec(U_i)†` (column stacking).
pub fn process_matrix(ops: &[WeightedUnitary]) -> Result<CMatrix> {
    let d = validate_ops(ops)?;
    let mut j = CMatrix::zeros(d * d, d * d);
    for (p, u) in ops {
        let v = vec_op(u);
        j += &v * v.adjoint() * Complex64::from(*p);
    }
    Ok(j)
}

/// The ensemble `{p_i, U_i|ψ⟩}`, with `U_i` acting on the leading factor of
/// `ψ` when `ψ` is larger than the operators.
pub fn ensemble_from_ops(ops: &[WeightedUnitary], psi: &Ket) -> Result<Ensemble> {
    let d = validate_ops(ops)?;
    let ext = extend(d, psi.dim())?;
    Ensemble::new(ops.iter().map(|(p, u)| Ok((*p, psi.apply(&ext(u))?))).collect::<Result<Vec<_>>>()?)
}

/// `Σ p_i (U_i ⊗ I)|ψ⟩⟨ψ|(U_i ⊗ I)†`.
pub fn channel_output(ops: &[WeightedUnitary], psi: &Ket) -> Result<DensityOp> {
    let d = validate_ops(ops)?;
    let ext = extend(d, psi.dim())?;
    let n = psi.dim();
    let mut m = CMatrix::zeros(n, n);
    for (p, u) in ops {
        let out = ext(u) * psi.amplitudes();
        m += &out * out.adjoint() * Complex64::from(*p);
    }
    Ok(DensityOp::from_parts_unchecked(m, psi.dims().to_vec()))
}

fn extend(d: usize, total: usize) -> Result<impl Fn(&CMatrix) -> CMatrix> {
    if !total.is_multiple_of(d) {
        return Err(QbcError::Dimension(format!("operators of dimension {d} on a state of dimension {total}")));
    }
    let rest = total / d;
    Ok(move |u: &CMatrix| if rest == 1 { u.clone() } else { u.kronecker(&CMatrix::identity(rest, rest)) })
}

/// Decides whether two random-unitary channels coincide and, if so, solves
/// for the unitary mixing matrix relating their decompositions.
///
/// Equality is judged on the process matrices with tolerance `1e-9·d`. The
/// mixing matrix is the unitary minimizing `‖AV − B‖_F` where the columns of
/// `A` and `B` are `√p_j vec(U_0j)` and `√p'_i vec(U_1i)`, padded with zero
/// columns to a common count.
pub fn kraus_freedom(ops0: &[WeightedUnitary], ops1: &[WeightedUnitary]) -> Result<KrausFreedomResult> {
    let d = validate_ops(ops0)?;
    let d1 = validate_ops(ops1)?;
    if d != d1 {
        return Err(QbcError::Dimension(format!("operators of dimension {d} and {d1}")));
    }
    let choi_distance = (process_matrix(ops0)? - process_matrix(ops1)?).norm();
    if choi_distance > VALIDATION_TOL * d as f64 {
        return Ok(KrausFreedomResult {
            equal: false,
            mix_v: None,
            choi_distance,
            residual: None,
            state_relation_error: None,
        });
    }
    let k = ops0.len().max(ops1.len());
    let columns = |ops: &[WeightedUnitary]| {
        let mut m = CMatrix::zeros(d * d, k);
        for (c, (p, u)) in ops.iter().enumerate() {
            m.set_column(c, &(vec_op(u) * Complex64::from(p.sqrt())));
        }
        m
    };
    let a = columns(ops0);
    let b = columns(ops1);
    let (v, _) = polar_unitary(&(b.adjoint() * &a))?;
    let residual = (&a * &v - &b).norm();
    if residual > MIX_RESIDUAL_TOL {
        return Err(QbcError::Numerical(format!("channels agree but the mixing solve left residual {residual}")));
    }

    let mut rng = stream_from_seed(STATE_CHECK_SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..STATE_CHECKS {
        let psi = haar_ket(&[d], &mut rng);
        for i in 0..k {
            let lhs = match ops1.get(i) {
                Some((p, u)) => u * psi.amplitudes() * Complex64::from(p.sqrt()),
                None => DVector::zeros(d),
            };
            let mut rhs = DVector::zeros(d);
            for (j, (p, u)) in ops0.iter().enumerate() {
                rhs += u * psi.amplitudes() * (v[(j, i)] * p.sqrt());
            }
            worst = worst.max((lhs - rhs).camax());
        }
    }
    Ok(KrausFreedomResult {
        equal: true,
        mix_v: Some(v),
        choi_distance,
        residual: Some(residual),
        state_relation_error: Some(worst),
    })
}

/// Single-qubit Paulis `I, X, Y, Z`.
pub fn paulis() -> [CMatrix; 4] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        CMatrix::identity(2, 2),
        CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// Two-qubit swap.
pub fn swap_gate() -> CMatrix {
    let mut s = CMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            s[(b * 2 + a, a * 2 + b)] = Complex64::new(1.0, 0.0);
        }
    }
    s
}

/// Pairs of distinct decompositions of the same channel, used as fixtures.
pub fn equal_channel_pairs() -> Vec<(&'static str, Vec<WeightedUnitary>, Vec<WeightedUnitary>)> {
    let [id, x, y, z] = paulis();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);

    // dephasing: {I, Z} vs {e^{iπZ/4}, e^{-iπZ/4}}
    let plus = CMatrix::from_diagonal(&DVector::from_vec(vec![
        Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
        Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4),
    ]));
    let minus = plus.adjoint();
    let dephasing = ("dephasing", vec![(0.5, id.clone()), (0.5, z.clone())], vec![(0.5, plus), (0.5, minus)]);

    // fully depolarizing: Paulis vs Paulis conjugated by a fixed unitary
    let w = {
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::from(s), Complex64::from(s), Complex64::from(s), Complex64::from(-s)],
        );
        let t =
            CMatrix::from_diagonal(&DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, 0.3)]));
        t * h
    };
    let conj: Vec<WeightedUnitary> = paulis().iter().map(|p| (0.25, &w * p * w.adjoint())).collect();
    let depolarizing = ("depolarizing", vec![(0.25, id), (0.25, x), (0.25, y), (0.25, z)], conj);

    // swap symmetrization: {I, SWAP} vs {(I ± i·SWAP)/√2}
    let sw = swap_gate();
    let e4 = CMatrix::identity(4, 4);
    let symmetrize = (
        "swap-symmetrize",
        vec![(0.5, e4.clone()), (0.5, sw.clone())],
        vec![(0.5, (&e4 + &sw * i) * Complex64::from(s)), (0.5, (&e4 - &sw * i) * Complex64::from(s))],
    );
    vec![dephasing, depolarizing, symmetrize]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::haar_unitary;

    #[test]
    fn same_ops_give_identity() {
        let mut rng = stream_from_seed(31);
        let ops = vec![(0.3, haar_unitary(2, &mut rng)), (0.7, haar_unitary(2, &mut rng))];
        let r = kraus_freedom(&ops, &ops).unwrap();
        assert!(r.equal);
        let v = r.mix_v.unwrap();
        assert!((v - CMatrix::identity(2, 2)).camax() < 1e-9);
    }

    #[test]
    fn reordering_gives_permutation() {
        let mut rng = stream_from_seed(32);
        let u: Vec<CMatrix> = (0..3).map(|_| haar_unitary(3, &mut rng)).collect();
        let ops0 = vec![(0.5, u[0].clone()), (0.3, u[1].clone()), (0.2, u[2].clone())];
        let ops1 = vec![(0.2, u[2].clone()), (0.5, u[0].clone()), (0.3, u[1].clone())];
        let r = kraus_freedom(&ops0, &ops1).unwrap();
        assert!(r.equal);
        let v = r.mix_v.unwrap();
        // column i of V selects the ops0 index feeding ops1 entry i
        for (i, j) in [(0, 2), (1, 0), (2, 1)] {
            assert!((v[(j, i)].norm() - 1.0).abs() < 1e-9);
        }
        assert!(r.state_relation_error.unwrap() < 1e-9);
    }

    #[test]
    fn fixtures_are_equal_channels() {
        for (name, a, b) in equal_channel_pairs() {
            let r = kraus_freedom(&a, &b).unwrap();
            assert!(r.equal, "{name}");
            assert!(r.residual.unwrap() <= MIX_RESIDUAL_TOL, "{name}");
            assert!(r.state_relation_error.unwrap() < 1e-9, "{name}");
        }
    }

    #[test]
    fn distinct_channels() {
        let [id, x, ..] = paulis();
        let r = kraus_freedom(&[(1.0, id)], &[(1.0, x)]).unwrap();
        assert!(!r.equal);
        assert!(r.mix_v.is_none());
    }

    #[test]
    fn rejects_non_unitary() {
        let m = CMatrix::identity(2, 2) * Complex64::from(2.0);
        assert!(matches!(
            kraus_freedom(&[(1.0, m.clone())], &[(1.0, m)]),
            Err(QbcError::Invariant { name: "ops.unitary", .. })
        ));
    }

    #[test]
    fn swap_acts_on_product_states() {
        let s = swap_gate();
        let a = Ket::basis(2, 0);
        let b = Ket::basis(2, 1);
        let ab = crate::qcore::tensor(&[a.clone(), b.clone()]).unwrap();
        let ba = crate::qcore::tensor(&[b, a]).unwrap();
        assert!((ab.apply(&s).unwrap().amplitudes() - ba.amplitudes()).camax() < 1e-15);
    }
}
