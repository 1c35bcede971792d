//! Two-qubit example where a single entangled input admits a perfect switch
//! for Adam while another input lets Babe read the bit outright.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::ensemble::Ensemble;
use super::kraus::{channel_output, ensemble_from_ops, kraus_freedom, paulis, swap_gate, WeightedUnitary};
use super::solver::{build_lambda, cheat_success, helstrom, optimal_overlap_cheat};
use crate::error::Result;
use crate::qcore::{tensor, trace_norm, CMatrix, Ket};

/// Evaluated checks for the counterexample.
#[derive(Debug, Clone, Serialize)]
pub struct SwapExampleChecks {
    /// `‖ρ^BC_0(Ψ) − ρ^BC_1(Ψ)‖₁`; zero means the entangled input conceals.
    pub rho_bc_distance: f64,
    /// Adam's best switch probability on the entangled input.
    pub adam_cheat: f64,
    /// Babe's guessing probability with the product input `|a⟩|a⟩`.
    pub babe_product_guess: f64,
    /// Whether the two operation sets define the same channel.
    pub channels_equal: bool,
    pub choi_distance: f64,
}

impl SwapExampleChecks {
    pub fn passed(&self) -> bool {
        self.rho_bc_distance <= 1e-12
            && (self.adam_cheat - 1.0).abs() <= 1e-9
            && (self.babe_product_guess - 1.0).abs() <= 1e-12
            && !self.channels_equal
    }
}

/// The bundled example: `|Ψ⟩`, both operation sets and their checks.
#[derive(Debug, Clone)]
pub struct SwapExample {
    /// `(|a⟩|a'⟩|f1⟩ + |a'⟩|a⟩|f2⟩)/√2` with dims `[2, 2, 2]`.
    pub psi: Ket,
    /// `{½ I, ½ P}` with `P` the qubit swap on `H^B`.
    pub ops0: Vec<WeightedUnitary>,
    /// `{½ R, ½ R·P}` with `R = X ⊗ X` exchanging `|a⟩` and `|a'⟩` on both qubits.
    pub ops1: Vec<WeightedUnitary>,
    /// Mixing matrix solving the switch on `Ψ`.
    pub cheat_v: CMatrix,
    pub checks: SwapExampleChecks,
}

fn a() -> Ket {
    Ket::basis(2, 0)
}

fn a_prime() -> Ket {
    Ket::basis(2, 1)
}

/// `|a⟩|a'⟩` and `|a'⟩|a⟩`.
pub fn exchange_pair() -> (Ket, Ket) {
    (tensor(&[a(), a_prime()]).expect("qubits"), tensor(&[a_prime(), a()]).expect("qubits"))
}

/// `|a⟩|a⟩` and `|a'⟩|a'⟩`, where the two channels are distinguishable.
pub fn aligned_pair() -> (Ket, Ket) {
    (tensor(&[a(), a()]).expect("qubits"), tensor(&[a_prime(), a_prime()]).expect("qubits"))
}

pub fn swap_example_ops() -> (Vec<WeightedUnitary>, Vec<WeightedUnitary>) {
    let p = swap_gate();
    let x = paulis()[1].clone();
    let r = x.kronecker(&x);
    let id = CMatrix::identity(4, 4);
    (vec![(0.5, id), (0.5, p.clone())], vec![(0.5, r.clone()), (0.5, &r * &p)])
}

pub fn swap_example_input() -> Ket {
    let (ab, ba) = exchange_pair();
    let s = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
    let f1 = Ket::basis(2, 0);
    let f2 = Ket::basis(2, 1);
    let t1 = tensor(&[ab, f1]).expect("qubits");
    let t2 = tensor(&[ba, f2]).expect("qubits");
    let amps: DVector<Complex64> = (t1.amplitudes() + t2.amplitudes()) * s;
    Ket::new(amps, vec![2, 2, 2]).expect("normalized by construction")
}

/// `Λ` for the ensembles the two operation sets produce from `|a⟩|a'⟩`.
pub fn exchange_lambda() -> Result<CMatrix> {
    let (ops0, ops1) = swap_example_ops();
    let (ab, _) = exchange_pair();
    build_lambda(&ensemble_from_ops(&ops0, &ab)?, &ensemble_from_ops(&ops1, &ab)?)
}

/// Builds the example and evaluates its checks.
pub fn swap_example_fixture() -> Result<SwapExample> {
    let (ops0, ops1) = swap_example_ops();
    let psi = swap_example_input();

    let r0 = channel_output(&ops0, &psi)?;
    let r1 = channel_output(&ops1, &psi)?;
    let rho_bc_distance = trace_norm(&(r0.matrix() - r1.matrix()))?;

    let e0: Ensemble = ensemble_from_ops(&ops0, &psi)?;
    let e1: Ensemble = ensemble_from_ops(&ops1, &psi)?;
    let sol = optimal_overlap_cheat(&e0, &e1)?;
    let adam_cheat = cheat_success(&e0, &e1, &sol.mix_v)?;

    let (aa, _) = aligned_pair();
    let babe_product_guess = helstrom(&channel_output(&ops0, &aa)?, &channel_output(&ops1, &aa)?)?;

    let kf = kraus_freedom(&ops0, &ops1)?;
    Ok(SwapExample {
        psi,
        ops0,
        ops1,
        cheat_v: sol.mix_v,
        checks: SwapExampleChecks {
            rho_bc_distance,
            adam_cheat,
            babe_product_guess,
            channels_equal: kf.equal,
            choi_distance: kf.choi_distance,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheat::scans::{uniform_concealing_scan, weight_on_span, InputSampler};
    use crate::rng::stream_from_seed;

    #[test]
    fn checks_pass() {
        let ex = swap_example_fixture().unwrap();
        assert!(ex.checks.rho_bc_distance <= 1e-12);
        assert!((ex.checks.adam_cheat - 1.0).abs() <= 1e-9);
        assert!((ex.checks.babe_product_guess - 1.0).abs() <= 1e-12);
        assert!(!ex.checks.channels_equal);
        assert!(ex.checks.passed());
    }

    #[test]
    fn exchange_lambda_by_hand() {
        // e0 = {|aa'⟩, |a'a⟩}, e1 = {|a'a⟩, |aa'⟩}, all weights ½
        let l = exchange_lambda().unwrap();
        let h = Complex64::from(0.5);
        let z = Complex64::from(0.0);
        let want = CMatrix::from_row_slice(2, 2, &[z, h, h, z]);
        assert!((l - want).camax() < 1e-15);
    }

    #[test]
    fn product_scan_reaches_full_distinguishability() {
        let (ops0, ops1) = swap_example_ops();
        let mut rng = stream_from_seed(51);
        let r = uniform_concealing_scan(&ops0, &ops1, 400, &InputSampler::Haar, &mut rng, false).unwrap();
        assert!(r.worst_distance > 2.0 - 1e-6, "{}", r.worst_distance);
        // the maximizers are not confined to the exchange span, where both
        // operation sets act identically
        let (ab, ba) = exchange_pair();
        assert!(weight_on_span(&r.worst_input, &[ab.clone(), ba.clone()]) < 0.99);
        let (aa, _) = aligned_pair();
        let single = uniform_concealing_scan(&ops0, &ops1, 1, &InputSampler::Set(vec![aa]), &mut rng, false).unwrap();
        assert!((single.worst_distance - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exchange_span_conceals() {
        let (ops0, ops1) = swap_example_ops();
        let (ab, ba) = exchange_pair();
        let mut rng = stream_from_seed(52);
        let inputs: Vec<Ket> = (0..50)
            .map(|_| {
                let c = crate::qcore::haar_ket(&[2], &mut rng);
                let amps = ab.amplitudes() * c.amplitudes()[0] + ba.amplitudes() * c.amplitudes()[1];
                Ket::new(amps, vec![4]).unwrap()
            })
            .collect();
        let r = uniform_concealing_scan(&ops0, &ops1, 0, &InputSampler::Set(inputs), &mut rng, false).unwrap();
        assert!(r.worst_distance < 1e-12);
    }
}
