use num_complex::Complex64;
use rand::Rng;

use super::state::{DensityOp, Ket, MeasurementBasis};
use super::CVector;
use crate::error::{QbcError, Result};

/// Something that has Born probabilities in a basis.
pub trait Measurable {
    fn born_probabilities(&self, basis: &MeasurementBasis) -> Result<Vec<f64>>;
}

impl Measurable for Ket {
    fn born_probabilities(&self, basis: &MeasurementBasis) -> Result<Vec<f64>> {
        if basis.dim() != self.dim() {
            return Err(QbcError::Dimension(format!(
                "basis of dimension {} for state of dimension {}",
                basis.dim(),
                self.dim()
            )));
        }
        Ok(basis.vectors().iter().map(|b| b.inner(self).norm_sqr()).collect())
    }
}

impl Measurable for DensityOp {
    fn born_probabilities(&self, basis: &MeasurementBasis) -> Result<Vec<f64>> {
        if basis.dim() != self.dim() {
            return Err(QbcError::Dimension(format!(
                "basis of dimension {} for state of dimension {}",
                basis.dim(),
                self.dim()
            )));
        }
        Ok(basis.vectors().iter().map(|b| self.expectation(b)).collect())
    }
}

/// Samples an outcome index from a probability vector with one uniform draw.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Born-rule sample of a full measurement on `state`.
pub fn measure_sample<S: Measurable, R: Rng + ?Sized>(
    state: &S,
    basis: &MeasurementBasis,
    rng: &mut R,
) -> Result<usize> {
    let probs = state.born_probabilities(basis)?;
    Ok(sample_index(&probs, rng))
}

/// Measures subsystem `index` of a pure multipartite state in `basis`,
/// returning the outcome and the collapsed (renormalized) state. The
/// measured subsystem is left in the observed basis vector.
pub fn measure_subsystem<R: Rng + ?Sized>(
    state: &Ket,
    index: usize,
    basis: &MeasurementBasis,
    rng: &mut R,
) -> Result<(usize, Ket)> {
    let dims = state.dims();
    if index >= dims.len() {
        return Err(QbcError::Subsystem(format!("subsystem {index} of {} subsystems", dims.len())));
    }
    let d = dims[index];
    if basis.dim() != d {
        return Err(QbcError::Dimension(format!("basis of dimension {} for subsystem of dimension {d}", basis.dim())));
    }
    let left: usize = dims[..index].iter().product();
    let right: usize = dims[index + 1..].iter().product();
    let amps = state.amplitudes();

    // branch k: (I ⊗ |b_k⟩⟨b_k| ⊗ I)|ψ⟩, factored as coefficient vectors on the rest
    let mut branches: Vec<CVector> = Vec::with_capacity(basis.len());
    let mut probs = Vec::with_capacity(basis.len());
    for b in basis.vectors() {
        let bv = b.amplitudes();
        let mut rest = CVector::zeros(left * right);
        for l in 0..left {
            for r in 0..right {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    acc += bv[j].conj() * amps[(l * d + j) * right + r];
                }
                rest[l * right + r] = acc;
            }
        }
        probs.push(rest.norm_squared());
        branches.push(rest);
    }
    let k = sample_index(&probs, rng);
    let rest = &branches[k];
    let bv = basis.vectors()[k].amplitudes();
    let norm = probs[k].sqrt();
    let mut out = CVector::zeros(amps.len());
    for l in 0..left {
        for r in 0..right {
            let coef = rest[l * right + r] / norm;
            for j in 0..d {
                out[(l * d + j) * right + r] = bv[j] * coef;
            }
        }
    }
    Ok((k, Ket::from_parts_unchecked(out, dims.to_vec())))
}
