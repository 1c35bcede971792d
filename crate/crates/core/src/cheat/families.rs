//! Ensemble pairs used as fixtures and in property checks.

use num_complex::Complex64;
use rand::Rng;

use super::ensemble::Ensemble;
use crate::error::{QbcError, Result};
use crate::qcore::{haar_ket, Ket};

/// Same orthonormal qutrit basis in both ensembles, listed in a rotated
/// order, so `ρ0 = ρ1` while no state is shared index by index.
pub fn permutation_pair() -> (Ensemble, Ensemble) {
    let b = |k| Ket::basis(3, k);
    let e0 = Ensemble::uniform(vec![b(0), b(1), b(2)]).expect("valid");
    let e1 = Ensemble::uniform(vec![b(1), b(2), b(0)]).expect("valid");
    (e0, e1)
}

/// The same non-orthogonal qubit ensemble twice.
pub fn identical_pair() -> (Ensemble, Ensemble) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = Ket::qubit(Complex64::from(s), Complex64::from(s)).expect("normalized");
    let e = Ensemble::new(vec![(0.4, Ket::basis(2, 0)), (0.6, plus)]).expect("valid");
    (e.clone(), e)
}

/// Random pair with at most `max_states` entries per ensemble on a space of
/// dimension at most `max_dim`. Weights are drawn away from zero.
pub fn random_pair<R: Rng + ?Sized>(max_states: usize, max_dim: usize, rng: &mut R) -> (Ensemble, Ensemble) {
    let dim = rng.random_range(2..=max_dim.max(2));
    let make = |rng: &mut R| {
        let m = rng.random_range(1..=max_states.max(1));
        let raw: Vec<f64> = (0..m).map(|_| 0.1 + rng.random::<f64>()).collect();
        let tot: f64 = raw.iter().sum();
        Ensemble::new(raw.iter().map(|w| (w / tot, haar_ket(&[dim], rng))).collect()).expect("valid")
    };
    let e0 = make(rng);
    let e1 = make(rng);
    (e0, e1)
}

/// Qutrit pair with `‖ρ0 − ρ1‖₁ = δ`: each ensemble is an equal mixture of
/// a shared state `|2⟩` and one of `cos a|0⟩ ± sin a|1⟩`, `sin 2a = δ`.
pub fn trace_distance_family(delta: f64) -> Result<(Ensemble, Ensemble)> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(QbcError::Config(format!("δ = {delta} outside [0, 1]")));
    }
    let a = 0.5 * delta.asin();
    let tilt = |sign: f64| {
        Ket::from_amplitudes(&[Complex64::from(a.cos()), Complex64::from(sign * a.sin()), Complex64::from(0.0)])
            .expect("normalized")
    };
    let e0 = Ensemble::uniform(vec![tilt(1.0), Ket::basis(3, 2)])?;
    let e1 = Ensemble::uniform(vec![tilt(-1.0), Ket::basis(3, 2)])?;
    Ok((e0, e1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::trace_norm;
    use crate::rng::stream_from_seed;

    #[test]
    fn family_hits_requested_distance() {
        for delta in [0.0, 0.05, 0.2, 1.0] {
            let (e0, e1) = trace_distance_family(delta).unwrap();
            let d = trace_norm(&(e0.density().matrix() - e1.density().matrix())).unwrap();
            assert!((d - delta).abs() < 1e-12, "{delta} -> {d}");
        }
        assert!(trace_distance_family(1.5).is_err());
    }

    #[test]
    fn permutation_pair_has_equal_states() {
        let (e0, e1) = permutation_pair();
        assert!((e0.density().matrix() - e1.density().matrix()).camax() < 1e-15);
    }

    #[test]
    fn random_pair_respects_limits() {
        let mut rng = stream_from_seed(4);
        for _ in 0..50 {
            let (e0, e1) = random_pair(4, 8, &mut rng);
            assert!(e0.len() <= 4 && e1.len() <= 4);
            assert!(e0.state_dim() <= 8 && e0.state_dim() == e1.state_dim());
        }
    }
}
