use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::state::{DensityOp, Ket};
use super::{CMatrix, CVector, RANK_CUTOFF};
use crate::error::{QbcError, Result};

/// Kronecker product of a non-empty list of parts; dims are concatenated.
pub trait TensorProduct: Sized {
    fn tensor_all(parts: &[Self]) -> Result<Self>;
}

impl TensorProduct for Ket {
    fn tensor_all(parts: &[Ket]) -> Result<Ket> {
        let (first, rest) = parts.split_first().ok_or(QbcError::Empty("tensor"))?;
        let mut amps = first.amplitudes().clone();
        let mut dims = first.dims().to_vec();
        for p in rest {
            amps = amps.kronecker(p.amplitudes());
            dims.extend_from_slice(p.dims());
        }
        Ok(Ket::from_parts_unchecked(amps, dims))
    }
}

impl TensorProduct for DensityOp {
    fn tensor_all(parts: &[DensityOp]) -> Result<DensityOp> {
        let (first, rest) = parts.split_first().ok_or(QbcError::Empty("tensor"))?;
        let mut m = first.matrix().clone();
        let mut dims = first.dims().to_vec();
        for p in rest {
            m = m.kronecker(p.matrix());
            dims.extend_from_slice(p.dims());
        }
        Ok(DensityOp::from_parts_unchecked(m, dims))
    }
}

pub fn tensor<T: TensorProduct>(parts: &[T]) -> Result<T> {
    T::tensor_all(parts)
}

/// Kronecker product of plain matrices.
pub fn kron_all(parts: &[CMatrix]) -> Result<CMatrix> {
    let (first, rest) = parts.split_first().ok_or(QbcError::Empty("kron"))?;
    Ok(rest.iter().fold(first.clone(), |acc, m| acc.kronecker(m)))
}

/// Reduced density operator on the subsystems listed in `keep`.
pub fn partial_trace(rho: &DensityOp, keep: &[usize]) -> Result<DensityOp> {
    let (m, dims) = partial_trace_matrix(rho.matrix(), rho.dims(), keep)?;
    Ok(DensityOp::from_parts_unchecked(m, dims))
}

/// Partial trace of an arbitrary square operator with subsystem `dims`.
/// Kept subsystems appear in increasing index order.
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<(CMatrix, Vec<usize>)> {
    let total: usize = dims.iter().product();
    if m.nrows() != total || m.ncols() != total {
        return Err(QbcError::Dimension(format!("operator {}x{} does not match dims {dims:?}", m.nrows(), m.ncols())));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    if kept.windows(2).any(|w| w[0] == w[1]) {
        return Err(QbcError::Subsystem(format!("duplicate index in {keep:?}")));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(QbcError::Subsystem(format!("index {bad} out of range for {} subsystems", dims.len())));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();

    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let dk: usize = kept_dims.iter().product::<usize>().max(1);
    let dt: usize = traced_dims.iter().product::<usize>().max(1);

    let offsets = |sub: &[usize], sub_dims: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for (pos, &s) in sub.iter().enumerate().rev() {
                    let d = sub_dims[pos];
                    off += (idx % d) * strides[s];
                    idx /= d;
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept, &kept_dims, dk);
    let traced_off = offsets(&traced, &traced_dims, dt);

    let mut out = CMatrix::zeros(dk, dk);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &to in &traced_off {
                acc += m[(ro + to, co + to)];
            }
            out[(r, c)] = acc;
        }
    }
    let out_dims = if kept_dims.is_empty() { vec![1] } else { kept_dims };
    Ok((out, out_dims))
}

/// Eigenvalues of a Hermitian matrix (only the Hermitian part is used).
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = hermitian_part(m);
    h.symmetric_eigen().eigenvalues.iter().cloned().collect()
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).unscale(2.0)
}

fn is_hermitian(m: &CMatrix) -> bool {
    let scale = m.camax().max(1.0);
    (m - m.adjoint()).camax() <= 1e-13 * scale
}

/// Schatten 1-norm: the sum of singular values.
pub fn trace_norm(op: &CMatrix) -> Result<f64> {
    if !op.is_square() {
        return Err(QbcError::NotSquare { rows: op.nrows(), cols: op.ncols() });
    }
    if op.nrows() == 0 {
        return Ok(0.0);
    }
    if is_hermitian(op) {
        Ok(hermitian_eigenvalues(op).iter().map(|l| l.abs()).sum())
    } else {
        Ok(op.clone().singular_values().sum())
    }
}

/// Square root of a positive semidefinite Hermitian matrix. Eigenvalues
/// below `1e-13` of the largest are round-off and set to zero, since their
/// square roots would otherwise leak `~√ε` into fidelities.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let eig = hermitian_part(m).symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let vals =
        eig.eigenvalues.map(
            |l| {
                if l <= 1e-13 * top {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(l.sqrt(), 0.0)
                }
            },
        );
    &eig.eigenvectors * CMatrix::from_diagonal(&vals) * eig.eigenvectors.adjoint()
}

/// Uhlmann fidelity `tr √(√ρ₀ ρ₁ √ρ₀)`, evaluated as `‖√ρ₀ √ρ₁‖₁`.
pub fn fidelity(rho0: &DensityOp, rho1: &DensityOp) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(QbcError::Dimension(format!("fidelity of {}-dim and {}-dim states", rho0.dim(), rho1.dim())));
    }
    let prod = psd_sqrt(rho0.matrix()) * psd_sqrt(rho1.matrix());
    let f = prod.singular_values().sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Polar decomposition `L = |L|·U†` with `|L| = (L L†)^{1/2}`.
///
/// Returns `(U, |L|)`; `L·U = |L|` so `tr(L·U) = tr|L|`, the maximum of
/// `|tr(L·V)|` over unitaries `V`. For singular `L` the unitary is completed
/// on the null space by whatever orthonormal completion the SVD returns.
pub fn polar_unitary(l: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    if !l.is_square() {
        return Err(QbcError::NotSquare { rows: l.nrows(), cols: l.ncols() });
    }
    let n = l.nrows();
    if n == 0 {
        return Err(QbcError::Empty("polar decomposition"));
    }
    let svd = l.clone().svd(true, true);
    let w = svd.u.ok_or_else(|| QbcError::Numerical("SVD produced no U".into()))?;
    let xh = svd.v_t.ok_or_else(|| QbcError::Numerical("SVD produced no V".into()))?;
    let smax = svd.singular_values.max();
    let sig = svd.singular_values.map(|s| {
        if s <= RANK_CUTOFF * smax {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(s, 0.0)
        }
    });
    let abs_l = &w * CMatrix::from_diagonal(&sig) * w.adjoint();
    let abs_l = hermitian_part(&abs_l);
    let u = (&w * &xh).adjoint();
    Ok((u, abs_l))
}

/// Frobenius distance of `U†U` from the identity.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n)).norm()
}

/// Complex standard-normal vector (real and imaginary parts N(0, 1/2)).
pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DVector::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// Haar-random pure state: a normalized complex Gaussian vector.
pub fn haar_ket<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Ket {
    let d: usize = dims.iter().product();
    loop {
        let v = gaussian_vector(d, rng);
        if v.norm() > 1e-12 {
            return Ket::from_parts_unchecked(v.unscale(v.norm()), dims.to_vec());
        }
    }
}

/// Haar-random unitary: the unitary factor of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // fix column phases so the distribution is exactly Haar
    let phases = DVector::from_fn(dim, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    q * CMatrix::from_diagonal(&phases)
}

/// Random density operator from a Ginibre matrix `G G† / tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityOp {
    let g = gaussian_matrix(dim, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOp::from_parts_unchecked(m.unscale(tr), vec![dim])
}

/// `exp(i·H)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &CMatrix) -> CMatrix {
    let eig = hermitian_part(h).symmetric_eigen();
    let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, l));
    &eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}

/// Random Hermitian matrix with Gaussian entries, used as a geodesic
/// direction on the unitary group.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    hermitian_part(&gaussian_matrix(dim, dim, rng))
}

/// Embeds an operator into a larger space: `left ⊗ op ⊗ right` identity
/// padding acting on subsystem `index` of `dims`.
pub fn embed(op: &CMatrix, dims: &[usize], index: usize) -> Result<CMatrix> {
    if index >= dims.len() || op.nrows() != dims[index] || !op.is_square() {
        return Err(QbcError::Subsystem(format!(
            "cannot embed {}x{} operator at subsystem {index} of {dims:?}",
            op.nrows(),
            op.ncols()
        )));
    }
    let left: usize = dims[..index].iter().product();
    let right: usize = dims[index + 1..].iter().product();
    Ok(CMatrix::identity(left, left).kronecker(op).kronecker(&CMatrix::identity(right, right)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_from_seed;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tensor_of_zero_kets() {
        let k = tensor(&[Ket::basis(2, 0), Ket::basis(2, 0)]).unwrap();
        assert_eq!(k.dims(), &[2, 2]);
        let expect = [1.0, 0.0, 0.0, 0.0];
        for (a, e) in k.amplitudes().iter().zip(expect) {
            assert_eq!(*a, c(e, 0.0));
        }
    }

    #[test]
    fn tensor_empty_is_error() {
        let parts: Vec<Ket> = vec![];
        assert!(matches!(tensor(&parts), Err(QbcError::Empty(_))));
    }

    #[test]
    fn tensor_density_trace_multiplies() {
        let mut rng = stream_from_seed(11);
        let rho = random_density(3, 3, &mut rng);
        let t = tensor(&[rho, DensityOp::maximally_mixed(2)]).unwrap();
        assert!((t.matrix().trace().re - 1.0).abs() < 1e-12);
        assert_eq!(t.dims(), &[3, 2]);
    }

    #[test]
    fn bell_partial_trace_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell =
            Ket::new(CVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]), vec![2, 2]).unwrap();
        let red = partial_trace(&bell.projector(), &[1]).unwrap();
        let diff = red.matrix() - DensityOp::maximally_mixed(2).matrix();
        assert!(diff.camax() < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_recovers_factors() {
        let mut rng = stream_from_seed(3);
        let a = random_density(2, 2, &mut rng);
        let b = random_density(3, 2, &mut rng);
        let cc = random_density(2, 1, &mut rng);
        let abc = tensor(&[a.clone(), b.clone(), cc.clone()]).unwrap();
        let got_b = partial_trace(&abc, &[1]).unwrap();
        assert!((got_b.matrix() - b.matrix()).camax() < 1e-13);
        let got_ac = partial_trace(&abc, &[2, 0]).unwrap();
        let ac = tensor(&[a, cc]).unwrap();
        assert!((got_ac.matrix() - ac.matrix()).camax() < 1e-13);
        assert_eq!(got_ac.dims(), &[2, 2]);
    }

    #[test]
    fn partial_trace_bad_index() {
        let rho = DensityOp::maximally_mixed(4);
        let rho = DensityOp::new(rho.matrix().clone(), vec![2, 2]).unwrap();
        assert!(matches!(partial_trace(&rho, &[2]), Err(QbcError::Subsystem(_))));
        assert!(matches!(partial_trace(&rho, &[0, 0]), Err(QbcError::Subsystem(_))));
    }

    #[test]
    fn trace_norm_examples() {
        let z = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!((trace_norm(&z).unwrap() - 2.0).abs() < 1e-15);
        let zero = &z - &z;
        assert_eq!(trace_norm(&zero).unwrap(), 0.0);
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(trace_norm(&rect), Err(QbcError::NotSquare { .. })));
    }

    #[test]
    fn trace_norm_non_hermitian_uses_singular_values() {
        // [[0, 2], [0, 0]] has singular values (2, 0) but zero eigenvalues
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((trace_norm(&m).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polar_examples() {
        let l = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-3.0, 0.0)]);
        let (u, abs_l) = polar_unitary(&l).unwrap();
        let want_abs = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
        let want_u = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!((abs_l - want_abs).camax() < 1e-12);
        assert!((u - want_u).camax() < 1e-12);

        let mut rng = stream_from_seed(5);
        let rho = random_density(3, 3, &mut rng);
        let (u, _) = polar_unitary(rho.matrix()).unwrap();
        assert!((u - CMatrix::identity(3, 3)).camax() < 1e-10);

        let w = haar_unitary(4, &mut rng);
        let (u, abs_w) = polar_unitary(&w).unwrap();
        assert!((abs_w - CMatrix::identity(4, 4)).camax() < 1e-10);
        assert!((u - w.adjoint()).camax() < 1e-10);
    }

    #[test]
    fn polar_rank_deficient_is_completed() {
        let mut rng = stream_from_seed(9);
        let a = gaussian_matrix(4, 2, &mut rng);
        let b = gaussian_matrix(2, 4, &mut rng);
        let l = a * b; // rank 2
        let (u, abs_l) = polar_unitary(&l).unwrap();
        assert!(unitarity_error(&u) < 1e-10);
        assert!((&l * &u - &abs_l).camax() < 1e-10);
        assert!((&abs_l * u.adjoint() - &l).camax() < 1e-10);
        assert!(((&l * &u).trace().re - trace_norm(&l).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn polar_non_square_is_error() {
        assert!(matches!(polar_unitary(&CMatrix::zeros(2, 3)), Err(QbcError::NotSquare { .. })));
    }

    #[test]
    fn fidelity_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zero = Ket::basis(2, 0);
        let one = Ket::basis(2, 1);
        let plus = Ket::qubit(c(s, 0.0), c(s, 0.0)).unwrap();
        let rho = zero.projector();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&rho, &one.projector()).unwrap().abs() < 1e-7);
        // pure-state fidelity is |⟨ψ0|ψ1⟩|
        let f = fidelity(&rho, &plus.projector()).unwrap();
        let overlap = zero.inner(&plus).norm();
        assert!((f - overlap).abs() < 1e-9);
        assert!((f - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(matches!(fidelity(&rho, &DensityOp::maximally_mixed(3)), Err(QbcError::Dimension(_))));
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = stream_from_seed(1);
        for d in 1..6 {
            assert!(unitarity_error(&haar_unitary(d, &mut rng)) < 1e-12);
        }
    }

    #[test]
    fn embed_places_operator() {
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let e = embed(&x, &[2, 3, 2], 2).unwrap();
        let want = CMatrix::identity(6, 6).kronecker(&x);
        assert!((e - want).camax() < 1e-15);
        assert!(embed(&x, &[2, 3], 1).is_err());
    }
}
