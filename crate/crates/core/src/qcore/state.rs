use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{CMatrix, CVector, VALIDATION_TOL};
use crate::error::{QbcError, Result};

/// Normalized pure state on a tensor product of subsystems.
///
/// Subsystem order follows the Kronecker convention: the first entry of
/// `dims` is the most significant index of the amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: CVector,
    dims: Vec<usize>,
}

impl Ket {
    /// Builds a ket, requiring unit norm within the validation tolerance.
    pub fn new(amps: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(amps.len(), &dims)?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > VALIDATION_TOL {
            return Err(QbcError::invariant("ket.norm", format!("norm {norm} differs from 1")));
        }
        Ok(Ket { amps, dims })
    }

    /// Builds a ket after rescaling `amps` to unit norm.
    pub fn normalized(amps: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(amps.len(), &dims)?;
        let norm = amps.norm();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(QbcError::invariant("ket.norm", "cannot normalize zero vector"));
        }
        Ok(Ket { amps: amps.unscale(norm), dims })
    }

    /// Single-system ket from amplitudes.
    pub fn from_amplitudes(amps: &[Complex64]) -> Result<Self> {
        let n = amps.len();
        Ket::new(DVector::from_column_slice(amps), vec![n])
    }

    /// Computational basis vector `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut amps = CVector::zeros(dim);
        amps[k] = Complex64::new(1.0, 0.0);
        Ket { amps, dims: vec![dim] }
    }

    /// Qubit `a|0⟩ + b|1⟩` (must be normalized).
    pub fn qubit(a: Complex64, b: Complex64) -> Result<Self> {
        Ket::new(DVector::from_vec(vec![a, b]), vec![2])
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// Applies a matrix that is expected to be unitary; the result must stay
    /// normalized within tolerance.
    pub fn apply(&self, op: &CMatrix) -> Result<Ket> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(QbcError::Dimension(format!(
                "operator {}x{} on ket of dimension {}",
                op.nrows(),
                op.ncols(),
                self.dim()
            )));
        }
        Ket::new(op * &self.amps, self.dims.clone())
    }

    /// Same amplitudes with a different subsystem split.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Ket> {
        check_dims(self.dim(), &dims)?;
        Ok(Ket { amps: self.amps.clone(), dims })
    }

    pub fn projector(&self) -> DensityOp {
        DensityOp { matrix: &self.amps * self.amps.adjoint(), dims: self.dims.clone() }
    }

    pub(crate) fn from_parts_unchecked(amps: CVector, dims: Vec<usize>) -> Ket {
        Ket { amps, dims }
    }
}

/// Mixed state: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityOp {
    /// Validates hermiticity, trace and positivity (eigenvalues ≥ −1e-9).
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QbcError::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        check_dims(matrix.nrows(), &dims)?;
        let herm_err = (&matrix - matrix.adjoint()).camax();
        if herm_err > VALIDATION_TOL {
            return Err(QbcError::invariant("density.hermitian", format!("max |ρ − ρ†| = {herm_err}")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > VALIDATION_TOL || tr.im.abs() > VALIDATION_TOL {
            return Err(QbcError::invariant("density.trace", format!("trace {tr} differs from 1")));
        }
        let min_eig = super::linalg::hermitian_eigenvalues(&matrix).iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -VALIDATION_TOL {
            return Err(QbcError::invariant("density.positive", format!("eigenvalue {min_eig} below zero")));
        }
        Ok(DensityOp { matrix, dims })
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOp { matrix: CMatrix::identity(dim, dim).unscale(dim as f64), dims: vec![dim] }
    }

    /// Convex mixture `Σ p_i |k_i⟩⟨k_i|` of kets with identical dims.
    pub fn mixture(weights: &[f64], kets: &[Ket]) -> Result<Self> {
        if kets.is_empty() {
            return Err(QbcError::Empty("mixture"));
        }
        if weights.len() != kets.len() {
            return Err(QbcError::Dimension("weights and kets differ in length".into()));
        }
        let dims = kets[0].dims().to_vec();
        let d = kets[0].dim();
        let mut m = CMatrix::zeros(d, d);
        let mut total = 0.0;
        for (&w, k) in weights.iter().zip(kets) {
            if k.dims() != dims.as_slice() {
                return Err(QbcError::Dimension("mixture kets have different dims".into()));
            }
            if w < 0.0 {
                return Err(QbcError::invariant("mixture.weight", format!("negative weight {w}")));
            }
            total += w;
            m += k.amplitudes() * k.amplitudes().adjoint() * Complex64::from(w);
        }
        if (total - 1.0).abs() > VALIDATION_TOL {
            return Err(QbcError::invariant("mixture.weights", format!("weights sum to {total}")));
        }
        Ok(DensityOp { matrix: m, dims })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<DensityOp> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(QbcError::Dimension("unitary does not match density operator".into()));
        }
        Ok(DensityOp { matrix: u * &self.matrix * u.adjoint(), dims: self.dims.clone() })
    }

    /// `⟨k|ρ|k⟩`.
    pub fn expectation(&self, k: &Ket) -> f64 {
        (k.amplitudes().adjoint() * &self.matrix * k.amplitudes())[(0, 0)].re
    }

    /// For operators assembled from already valid pieces (tensor products,
    /// partial traces, convex mixtures).
    pub(crate) fn from_parts_unchecked(matrix: CMatrix, dims: Vec<usize>) -> DensityOp {
        DensityOp { matrix, dims }
    }
}

impl From<&Ket> for DensityOp {
    fn from(k: &Ket) -> Self {
        k.projector()
    }
}

/// Complete orthonormal basis of one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    vectors: Vec<Ket>,
}

impl MeasurementBasis {
    /// Requires `dim` pairwise orthonormal vectors of dimension `dim`.
    pub fn new(vectors: Vec<Ket>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(QbcError::Empty("measurement basis"));
        };
        let d = first.dim();
        if vectors.len() != d {
            return Err(QbcError::invariant("basis.complete", format!("{} vectors for dimension {d}", vectors.len())));
        }
        for (i, a) in vectors.iter().enumerate() {
            if a.dim() != d {
                return Err(QbcError::Dimension("basis vectors differ in dimension".into()));
            }
            for b in &vectors[i + 1..] {
                let ov = a.inner(b).norm();
                if ov > VALIDATION_TOL {
                    return Err(QbcError::invariant(
                        "basis.orthonormal",
                        format!("overlap {ov} between basis vectors"),
                    ));
                }
            }
        }
        Ok(MeasurementBasis { vectors })
    }

    pub fn computational(dim: usize) -> Self {
        MeasurementBasis { vectors: (0..dim).map(|k| Ket::basis(dim, k)).collect() }
    }

    /// Columns of a unitary matrix as a basis.
    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        let d = u.nrows();
        let vectors =
            (0..u.ncols()).map(|c| Ket::new(u.column(c).into_owned(), vec![d])).collect::<Result<Vec<_>>>()?;
        MeasurementBasis::new(vectors)
    }

    pub fn vectors(&self) -> &[Ket] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    /// Matrix whose columns are the basis vectors.
    pub fn as_matrix(&self) -> CMatrix {
        let d = self.dim();
        DMatrix::from_fn(d, self.vectors.len(), |r, c| self.vectors[c].amplitudes()[r])
    }
}

fn check_dims(len: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(QbcError::Dimension(format!("invalid subsystem dims {dims:?}")));
    }
    let prod: usize = dims.iter().product();
    if prod != len {
        return Err(QbcError::invariant("dims.product", format!("dims {dims:?} multiply to {prod}, data has {len}")));
    }
    Ok(())
}
