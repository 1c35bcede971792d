use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QbcError, Result};
use crate::qcore::json::KetJson;
use crate::qcore::{partial_trace, tensor, DensityOp, Ket, MeasurementBasis, VALIDATION_TOL};

/// Weighted list of states `{p_i, |φ_i⟩}` Adam may send for one bit value.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    entries: Vec<(f64, Ket)>,
}

impl Ensemble {
    /// Probabilities must lie in (0, 1] and sum to 1 within 1e-9; all states
    /// share the same subsystem dims.
    pub fn new(entries: Vec<(f64, Ket)>) -> Result<Self> {
        let Some((_, first)) = entries.first() else {
            return Err(QbcError::Empty("ensemble"));
        };
        let dims = first.dims().to_vec();
        let mut total = 0.0;
        for (p, k) in &entries {
            if !(*p > 0.0 && *p <= 1.0 + VALIDATION_TOL) {
                return Err(QbcError::invariant(
                    "ensemble.probability_range",
                    format!("probability {p} outside (0, 1]"),
                ));
            }
            if k.dims() != dims.as_slice() {
                return Err(QbcError::Dimension(format!("ensemble states with dims {:?} and {dims:?}", k.dims())));
            }
            total += p;
        }
        if (total - 1.0).abs() > VALIDATION_TOL {
            return Err(QbcError::invariant("ensemble.probabilities_sum", format!("probabilities sum to {total}")));
        }
        Ok(Ensemble { entries })
    }

    /// Uniform weights over `states`.
    pub fn uniform(states: Vec<Ket>) -> Result<Self> {
        let n = states.len().max(1) as f64;
        Ensemble::new(states.into_iter().map(|k| (1.0 / n, k)).collect())
    }

    pub fn entries(&self) -> &[(f64, Ket)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        self.entries[0].1.dims()
    }

    pub fn state_dim(&self) -> usize {
        self.entries[0].1.dim()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|(p, _)| *p).collect()
    }

    /// `Σ p_i |φ_i⟩⟨φ_i|`.
    pub fn density(&self) -> DensityOp {
        let kets: Vec<Ket> = self.entries.iter().map(|(_, k)| k.clone()).collect();
        DensityOp::mixture(&self.probabilities(), &kets).expect("validated ensemble")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleEntryJson {
    pub p: f64,
    pub state: KetJson,
}

impl TryFrom<&[EnsembleEntryJson]> for Ensemble {
    type Error = QbcError;
    fn try_from(j: &[EnsembleEntryJson]) -> Result<Ensemble> {
        let entries = j.iter().map(|e| Ok((e.p, Ket::try_from(&e.state)?))).collect::<Result<Vec<_>>>()?;
        Ensemble::new(entries)
    }
}

impl From<&Ensemble> for Vec<EnsembleEntryJson> {
    fn from(e: &Ensemble) -> Self {
        e.entries.iter().map(|(p, k)| EnsembleEntryJson { p: *p, state: KetJson::from(k) }).collect()
    }
}

/// The two commitment ensembles for b = 0 and b = 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsemblePairJson {
    pub e0: Vec<EnsembleEntryJson>,
    pub e1: Vec<EnsembleEntryJson>,
}

impl EnsemblePairJson {
    pub fn parse(&self) -> Result<(Ensemble, Ensemble)> {
        let e0 = Ensemble::try_from(self.e0.as_slice())?;
        let e1 = Ensemble::try_from(self.e1.as_slice())?;
        if e0.dims() != e1.dims() {
            return Err(QbcError::Dimension(format!("ensembles on dims {:?} and {:?}", e0.dims(), e1.dims())));
        }
        Ok((e0, e1))
    }

    pub fn from_ensembles(e0: &Ensemble, e1: &Ensemble) -> Self {
        EnsemblePairJson { e0: e0.into(), e1: e1.into() }
    }
}

/// Entangled commitment `Σ_i √p_i |e_i⟩|φ_i⟩` on `H^A ⊗ H^B`, together with
/// the basis `{|e_i⟩}` Adam measures to open.
#[derive(Debug, Clone, PartialEq)]
pub struct PurifiedCommitment {
    phi: Ket,
    keep_basis: MeasurementBasis,
}

impl PurifiedCommitment {
    /// `phi` must have `H^A` as its first subsystem with the dimension of
    /// `keep_basis`.
    pub fn new(phi: Ket, keep_basis: MeasurementBasis) -> Result<Self> {
        if phi.dims().len() < 2 || phi.dims()[0] != keep_basis.dim() {
            return Err(QbcError::Dimension(format!(
                "commitment dims {:?} do not start with an H^A of dimension {}",
                phi.dims(),
                keep_basis.dim()
            )));
        }
        Ok(PurifiedCommitment { phi, keep_basis })
    }

    pub fn phi(&self) -> &Ket {
        &self.phi
    }

    pub fn keep_basis(&self) -> &MeasurementBasis {
        &self.keep_basis
    }

    pub fn dim_a(&self) -> usize {
        self.phi.dims()[0]
    }

    /// Subsystem dims of `H^B`.
    pub fn dims_b(&self) -> &[usize] {
        &self.phi.dims()[1..]
    }

    /// `tr_A |Φ⟩⟨Φ|`.
    pub fn reduced_b(&self) -> DensityOp {
        let keep: Vec<usize> = (1..self.phi.dims().len()).collect();
        partial_trace(&self.phi.projector(), &keep).expect("valid subsystem indices")
    }

    /// Checks that measuring `keep_basis` on `H^A` yields `φ_i` on `H^B` with
    /// probability `p_i`, within 1e-9.
    pub fn reconstructs(&self, e: &Ensemble) -> bool {
        let db = e.state_dim();
        if self.phi.dim() != self.dim_a() * db {
            return false;
        }
        let amps = self.phi.amplitudes();
        let mut seen = 0.0;
        for (i, b) in self.keep_basis.vectors().iter().enumerate() {
            // unnormalized conditional state (⟨e_i| ⊗ I)|Φ⟩
            let cond = DVector::from_fn(db, |r, _| {
                (0..self.dim_a()).map(|a| b.amplitudes()[a].conj() * amps[a * db + r]).sum::<Complex64>()
            });
            let w = cond.norm_squared();
            seen += w;
            match e.entries().get(i) {
                Some((p, k)) => {
                    if (w - p).abs() > VALIDATION_TOL {
                        return false;
                    }
                    let ov = k.amplitudes().dotc(&cond).norm();
                    if (ov - w.sqrt()).abs() > VALIDATION_TOL {
                        return false;
                    }
                }
                None => {
                    if w > VALIDATION_TOL {
                        return false;
                    }
                }
            }
        }
        (seen - 1.0).abs() <= VALIDATION_TOL
    }
}

/// `Σ_i √p_i |e_i⟩|φ_i⟩` for the ensemble `e` and Adam's basis `{|e_i⟩}`.
pub fn commit_purify(e: &Ensemble, keep_basis: &MeasurementBasis) -> Result<PurifiedCommitment> {
    if keep_basis.len() < e.len() {
        return Err(QbcError::Dimension(format!(
            "basis of size {} for ensemble of size {}",
            keep_basis.len(),
            e.len()
        )));
    }
    let da = keep_basis.dim();
    let mut dims = vec![da];
    dims.extend_from_slice(e.dims());
    let mut amps = DVector::zeros(da * e.state_dim());
    for ((p, phi), ei) in e.entries().iter().zip(keep_basis.vectors()) {
        let term = tensor(&[ei.clone(), phi.clone()])?;
        amps += term.amplitudes() * Complex64::new(p.sqrt(), 0.0);
    }
    let phi = Ket::new(amps, dims)?;
    PurifiedCommitment::new(phi, keep_basis.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::GreatCircle;

    #[test]
    fn rejects_bad_probabilities() {
        let k = Ket::basis(2, 0);
        let err = Ensemble::new(vec![(0.5, k.clone()), (0.4, k.clone())]).unwrap_err();
        assert!(matches!(err, QbcError::Invariant { name: "ensemble.probabilities_sum", .. }));
        assert!(Ensemble::new(vec![(0.0, k.clone()), (1.0, k)]).is_err());
    }

    #[test]
    fn single_state_commitment_is_product() {
        let phi = GreatCircle::standard().state(0.8);
        let e = Ensemble::new(vec![(1.0, phi.clone())]).unwrap();
        let basis = MeasurementBasis::computational(2);
        let c = commit_purify(&e, &basis).unwrap();
        let want = tensor(&[Ket::basis(2, 0), phi]).unwrap();
        assert!((c.phi().amplitudes() - want.amplitudes()).camax() < 1e-15);
        assert!(c.reconstructs(&e));
    }

    #[test]
    fn orthogonal_pair_gives_bell_like_state() {
        let e = Ensemble::uniform(vec![Ket::basis(2, 0), Ket::basis(2, 1)]).unwrap();
        let c = commit_purify(&e, &MeasurementBasis::computational(2)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = c.phi().amplitudes();
        assert!((a[0].re - s).abs() < 1e-15 && (a[3].re - s).abs() < 1e-15);
        assert!(a[1].norm() < 1e-15 && a[2].norm() < 1e-15);
        let red = c.reduced_b();
        assert!((red.matrix() - DensityOp::maximally_mixed(2).matrix()).camax() < 1e-15);
        assert!(c.reconstructs(&e));
    }

    #[test]
    fn modulated_anonymous_state_commitment() {
        // λ0 U0|ψ⟩|e0⟩ + λ1 U1|ψ⟩|e1⟩ with λ = 1/√2, stored as |e_i⟩|φ_i⟩
        let c = GreatCircle::standard();
        let psi = c.state(0.6);
        let flipped = psi.apply(&c.flip()).unwrap();
        let e = Ensemble::uniform(vec![psi.clone(), flipped.clone()]).unwrap();
        let com = commit_purify(&e, &MeasurementBasis::computational(2)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = tensor(&[Ket::basis(2, 0), psi]).unwrap().amplitudes() * Complex64::new(s, 0.0)
            + tensor(&[Ket::basis(2, 1), flipped]).unwrap().amplitudes() * Complex64::new(s, 0.0);
        assert!((com.phi().amplitudes() - want).camax() < 1e-15);
        // reduced state on H^B is I/2 because the two branches are orthogonal
        let red = com.reduced_b();
        assert!((red.matrix() - DensityOp::maximally_mixed(2).matrix()).camax() < 1e-12);
    }

    #[test]
    fn basis_too_small() {
        let e = Ensemble::uniform(vec![Ket::basis(3, 0), Ket::basis(3, 1), Ket::basis(3, 2)]).unwrap();
        assert!(commit_purify(&e, &MeasurementBasis::computational(2)).is_err());
    }

    #[test]
    fn json_pair_roundtrip() {
        let e0 = Ensemble::uniform(vec![Ket::basis(2, 0), Ket::basis(2, 1)]).unwrap();
        let e1 = Ensemble::new(vec![(1.0, GreatCircle::standard().state(1.0))]).unwrap();
        let text = serde_json::to_string(&EnsemblePairJson::from_ensembles(&e0, &e1)).unwrap();
        let back: EnsemblePairJson = serde_json::from_str(&text).unwrap();
        let (a, b) = back.parse().unwrap();
        assert_eq!(a, e0);
        assert_eq!(b, e1);
    }
}
