use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use super::kraus::{channel_output, ensemble_from_ops, validate_ops, WeightedUnitary};
use super::solver::cheat_success;
use crate::error::{QbcError, Result};
use crate::qcore::linalg::gaussian_vector;
use crate::qcore::{haar_ket, trace_norm, GreatCircle, Ket};

/// Where scan inputs come from.
#[derive(Debug, Clone)]
pub enum InputSampler {
    /// Haar-uniform states.
    Haar,
    /// Uniform angle on a great circle (single qubit only).
    Circle(GreatCircle),
    /// Every state in a fixed list, in order; the sample count is ignored.
    Set(Vec<Ket>),
}

/// Result of a uniformity scan.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub worst_distance: f64,
    pub worst_input: Ket,
    pub min_distance: f64,
    pub mean_distance: f64,
    pub evaluated: usize,
}

/// Result of scanning one fixed mixing matrix over inputs.
#[derive(Debug, Clone)]
pub struct FixedCheatScan {
    pub min_p: f64,
    pub mean_p: f64,
    pub argmin: Ket,
    pub evaluated: usize,
}

fn draw_inputs<R: Rng + ?Sized>(
    sampler: &InputSampler,
    dims: &[usize],
    samples: usize,
    rng: &mut R,
) -> Result<Vec<Ket>> {
    let dim: usize = dims.iter().product();
    match sampler {
        InputSampler::Haar => Ok((0..samples).map(|_| haar_ket(dims, rng)).collect()),
        InputSampler::Circle(c) => {
            if dim != 2 {
                return Err(QbcError::Dimension(format!("great-circle inputs need a qubit, got dimension {dim}")));
            }
            Ok((0..samples).map(|_| c.state(rng.random::<f64>() * std::f64::consts::TAU)).collect())
        }
        InputSampler::Set(list) => {
            if list.is_empty() {
                return Err(QbcError::Empty("input set"));
            }
            list.iter()
                .map(|k| {
                    if k.dim() != dim {
                        Err(QbcError::Dimension(format!("input of dimension {} for scan dimension {dim}", k.dim())))
                    } else {
                        k.with_dims(dims.to_vec())
                    }
                })
                .collect()
        }
    }
}

fn distance(ops0: &[WeightedUnitary], ops1: &[WeightedUnitary], psi: &Ket) -> Result<f64> {
    let r0 = channel_output(ops0, psi)?;
    let r1 = channel_output(ops1, psi)?;
    trace_norm(&(r0.matrix() - r1.matrix()))
}

/// Largest `‖ρ_0(ψ) − ρ_1(ψ)‖₁` over sampled inputs, where
/// `ρ_b(ψ) = Σ p_bi U_bi ψψ† U_bi†`. With `entangled` the input lives on
/// `H^B ⊗ H^C` (`dim H^C = dim H^B`) and the operators act on `H^B` only.
///
/// For Haar sampling the best sample is then refined by a local hill climb
/// of `samples` further steps, since the maximizing inputs of interest can
/// sit in small regions of the sphere.
pub fn uniform_concealing_scan<R: Rng + ?Sized>(
    ops0: &[WeightedUnitary],
    ops1: &[WeightedUnitary],
    samples: usize,
    sampler: &InputSampler,
    rng: &mut R,
    entangled: bool,
) -> Result<ScanResult> {
    let d = validate_ops(ops0)?;
    if validate_ops(ops1)? != d {
        return Err(QbcError::Dimension("operator lists act on different spaces".into()));
    }
    let dims = if entangled { vec![d, d] } else { vec![d] };
    let inputs = draw_inputs(sampler, &dims, samples.max(1), rng)?;
    let mut worst: Option<(f64, Ket)> = None;
    let mut min = f64::INFINITY;
    let mut sum = 0.0;
    for psi in &inputs {
        let t = distance(ops0, ops1, psi)?;
        min = min.min(t);
        sum += t;
        if worst.as_ref().is_none_or(|(w, _)| t > *w) {
            worst = Some((t, psi.clone()));
        }
    }
    let evaluated = inputs.len();
    let (mut best, mut best_psi) = worst.expect("at least one input");

    if matches!(sampler, InputSampler::Haar) {
        let total: usize = dims.iter().product();
        let mut step = 0.3;
        let mut misses = 0;
        for _ in 0..samples {
            let kick = gaussian_vector(total, rng) * Complex64::from(step);
            let cand = Ket::normalized(best_psi.amplitudes() + kick, dims.clone())?;
            let t = distance(ops0, ops1, &cand)?;
            if t > best {
                best = t;
                best_psi = cand;
                misses = 0;
            } else {
                misses += 1;
                if misses >= 10 {
                    step = (step * 0.6f64).max(1e-6);
                    misses = 0;
                }
            }
        }
    }
    Ok(ScanResult {
        worst_distance: best,
        worst_input: best_psi,
        min_distance: min,
        mean_distance: sum / evaluated as f64,
        evaluated,
    })
}

/// Cheating probability of one fixed mixing matrix `v` across inputs, for
/// the input-dependent ensembles `{p_bi, U_bi|ψ⟩}`.
pub fn fixed_cheat_scan<R: Rng + ?Sized>(
    ops0: &[WeightedUnitary],
    ops1: &[WeightedUnitary],
    v: &nalgebra::DMatrix<Complex64>,
    samples: usize,
    sampler: &InputSampler,
    rng: &mut R,
) -> Result<FixedCheatScan> {
    let d = validate_ops(ops0)?;
    if validate_ops(ops1)? != d {
        return Err(QbcError::Dimension("operator lists act on different spaces".into()));
    }
    let dims = match sampler {
        InputSampler::Set(list) if !list.is_empty() => list[0].dims().to_vec(),
        _ => vec![d],
    };
    let inputs = draw_inputs(sampler, &dims, samples.max(1), rng)?;
    let mut min: Option<(f64, Ket)> = None;
    let mut sum = 0.0;
    for psi in &inputs {
        let e0 = ensemble_from_ops(ops0, psi)?;
        let e1 = ensemble_from_ops(ops1, psi)?;
        let p = cheat_success(&e0, &e1, v)?;
        sum += p;
        if min.as_ref().is_none_or(|(m, _)| p < *m) {
            min = Some((p, psi.clone()));
        }
    }
    let (min_p, argmin) = min.expect("at least one input");
    Ok(FixedCheatScan { min_p, mean_p: sum / inputs.len() as f64, argmin, evaluated: inputs.len() })
}

/// Weight of `psi` on the span of the given orthonormal vectors.
pub fn weight_on_span(psi: &Ket, span: &[Ket]) -> f64 {
    span.iter().map(|s| s.inner(psi).norm_sqr()).sum()
}

/// Four-state BB84 input set on `H^B ⊗ |0⟩^{extra}` used by the small
/// unmeasured-protocol instance.
pub fn bb84_with_ancilla(c: &GreatCircle, extra: usize) -> Result<Vec<Ket>> {
    c.bb84()
        .iter()
        .map(|k| {
            let mut amps = DVector::zeros(2 * extra);
            for a in 0..2 {
                amps[a * extra] = k.amplitudes()[a];
            }
            Ket::new(amps, vec![2, extra])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheat::kraus::{equal_channel_pairs, kraus_freedom};
    use crate::qcore::CMatrix;
    use crate::rng::stream_from_seed;

    #[test]
    fn equal_channels_scan_to_zero() {
        let mut rng = stream_from_seed(41);
        for (name, a, b) in equal_channel_pairs() {
            for entangled in [false, true] {
                let r = uniform_concealing_scan(&a, &b, 30, &InputSampler::Haar, &mut rng, entangled).unwrap();
                assert!(r.worst_distance < 1e-9, "{name}: {}", r.worst_distance);
            }
        }
    }

    #[test]
    fn circle_flip_is_always_orthogonal() {
        let c = GreatCircle::standard();
        let ops0 = vec![(1.0, CMatrix::identity(2, 2))];
        let ops1 = vec![(1.0, c.flip())];
        let mut rng = stream_from_seed(42);
        let r = uniform_concealing_scan(&ops0, &ops1, 200, &InputSampler::Circle(c), &mut rng, false).unwrap();
        assert!((r.min_distance - 2.0).abs() < 1e-9);
        assert!((r.worst_distance - 2.0).abs() < 1e-9);
    }

    #[test]
    fn solved_mixing_matrix_cheats_for_every_input() {
        let mut rng = stream_from_seed(43);
        for (name, a, b) in equal_channel_pairs() {
            let v = kraus_freedom(&a, &b).unwrap().mix_v.unwrap();
            let s = fixed_cheat_scan(&a, &b, &v, 50, &InputSampler::Haar, &mut rng).unwrap();
            assert!((s.min_p - 1.0).abs() < 1e-9, "{name}: {}", s.min_p);
        }
    }

    #[test]
    fn identity_mixing_on_orthogonal_outputs() {
        let c = GreatCircle::standard();
        let ops0 = vec![(1.0, CMatrix::identity(2, 2))];
        let ops1 = vec![(1.0, c.flip())];
        let mut rng = stream_from_seed(44);
        let s =
            fixed_cheat_scan(&ops0, &ops1, &CMatrix::identity(1, 1), 20, &InputSampler::Circle(c), &mut rng).unwrap();
        assert!(s.min_p.abs() < 1e-12);
    }
}
