use super::ensemble::PurifiedCommitment;
use crate::error::{QbcError, Result};
use crate::qcore::{polar_unitary, trace_norm, CMatrix};

/// Tolerance on `‖ρ^B_0 − ρ^B_1‖₁` for the switch to exist.
pub const SCHMIDT_TOL: f64 = 1e-9;

fn coefficient_matrix(c: &PurifiedCommitment) -> CMatrix {
    let da = c.dim_a();
    let db = c.phi().dim() / da;
    let amps = c.phi().amplitudes();
    CMatrix::from_fn(da, db, |a, r| amps[a * db + r])
}

/// Unitary `U^A` on Adam's side with `(U^A ⊗ I)|Φ0⟩ = |Φ1⟩`, for two
/// purifications with the same reduced state on `H^B`.
///
/// Writing `|Φ_b⟩ = Σ M_b[a, r] |a⟩|r⟩`, the switch is the unitary maximizing
/// `Re tr(M1† U M0)`, i.e. the polar unitary of `M0·M1†`. This fixes the
/// Schmidt vectors inside degenerate blocks in one step; it is unique up to
/// the null space of `M0·M1†`, where the SVD completion is used.
pub fn schmidt_switch(phi0: &PurifiedCommitment, phi1: &PurifiedCommitment) -> Result<CMatrix> {
    if phi0.phi().dims() != phi1.phi().dims() {
        return Err(QbcError::Dimension(format!(
            "purifications on dims {:?} and {:?}",
            phi0.phi().dims(),
            phi1.phi().dims()
        )));
    }
    let dist = trace_norm(&(phi0.reduced_b().matrix() - phi1.reduced_b().matrix()))?;
    if dist > SCHMIDT_TOL {
        return Err(QbcError::invariant("schmidt.reduced_states", format!("‖ρ^B_0 − ρ^B_1‖₁ = {dist}")));
    }
    let m0 = coefficient_matrix(phi0);
    let m1 = coefficient_matrix(phi1);
    let (u, _) = polar_unitary(&(&m0 * m1.adjoint()))?;
    Ok(u)
}

/// `|⟨Φ1|(U ⊗ I)|Φ0⟩|`.
pub fn switch_overlap(phi0: &PurifiedCommitment, phi1: &PurifiedCommitment, u: &CMatrix) -> f64 {
    let m0 = coefficient_matrix(phi0);
    let m1 = coefficient_matrix(phi1);
    (m1.adjoint() * u * m0).trace().norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{haar_unitary, Ket, MeasurementBasis};
    use crate::rng::stream_from_seed;
    use nalgebra::DVector;
    use num_complex::Complex64;

    fn commitment(amps: Vec<f64>, da: usize, db: usize) -> PurifiedCommitment {
        let v = DVector::from_vec(amps.into_iter().map(Complex64::from).collect());
        let k = Ket::normalized(v, vec![da, db]).unwrap();
        PurifiedCommitment::new(k, MeasurementBasis::computational(da)).unwrap()
    }

    #[test]
    fn identical_purifications() {
        let c = commitment(vec![0.6, 0.0, 0.0, 0.8], 2, 2);
        let u = schmidt_switch(&c, &c).unwrap();
        assert!((switch_overlap(&c, &c, &u) - 1.0).abs() < 1e-12);
        // U = I up to phase
        let ph = u[(0, 0)];
        assert!((u - CMatrix::identity(2, 2) * ph).camax() < 1e-9);
    }

    #[test]
    fn bell_pair_switch_is_bit_flip() {
        let c0 = commitment(vec![1.0, 0.0, 0.0, 1.0], 2, 2);
        let c1 = commitment(vec![0.0, 1.0, 1.0, 0.0], 2, 2);
        let u = schmidt_switch(&c0, &c1).unwrap();
        let x = CMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(Complex64::from));
        let ph = u[(0, 1)];
        assert!((u - x * ph).camax() < 1e-9);
    }

    #[test]
    fn random_purifications_of_fixed_state() {
        let mut rng = stream_from_seed(21);
        // ρ^B full rank on dimension 3, purified on dimension 3 in two ways
        let base = haar_unitary(9, &mut rng).column(0).into_owned();
        let k0 = Ket::new(base, vec![3, 3]).unwrap();
        let w = haar_unitary(3, &mut rng);
        let k1 = k0.apply(&w.kronecker(&CMatrix::identity(3, 3))).unwrap();
        let basis = MeasurementBasis::computational(3);
        let c0 = PurifiedCommitment::new(k0, basis.clone()).unwrap();
        let c1 = PurifiedCommitment::new(k1, basis).unwrap();
        let u = schmidt_switch(&c0, &c1).unwrap();
        assert!((switch_overlap(&c0, &c1, &u) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_spectrum() {
        // maximally entangled: every Schmidt coefficient equal
        let c0 = commitment(vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], 3, 3);
        let mut rng = stream_from_seed(22);
        let w = haar_unitary(3, &mut rng);
        let k1 = c0.phi().apply(&w.kronecker(&CMatrix::identity(3, 3))).unwrap();
        let c1 = PurifiedCommitment::new(k1, MeasurementBasis::computational(3)).unwrap();
        let u = schmidt_switch(&c0, &c1).unwrap();
        assert!((switch_overlap(&c0, &c1, &u) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unequal_reduced_states_rejected() {
        let c0 = commitment(vec![1.0, 0.0, 0.0, 0.0], 2, 2);
        let c1 = commitment(vec![0.0, 1.0, 0.0, 0.0], 2, 2);
        assert!(matches!(schmidt_switch(&c0, &c1), Err(QbcError::Invariant { name: "schmidt.reduced_states", .. })));
    }
}
