//! Dense complex linear algebra for small Hilbert spaces.

pub mod circle;
pub mod json;
pub mod linalg;
pub mod measure;
pub mod state;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use circle::GreatCircle;
pub use linalg::{
    fidelity, haar_ket, haar_unitary, kron_all, partial_trace, partial_trace_matrix, polar_unitary, tensor, trace_norm,
    unitarity_error,
};
pub use measure::{measure_sample, measure_subsystem};
pub use state::{DensityOp, Ket, MeasurementBasis};

/// Column-major dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance for validating normalization, hermiticity, orthonormality.
pub const VALIDATION_TOL: f64 = 1e-9;

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Default cap on the total dimension of explicitly built operators.
pub const DEFAULT_DIM_CAP: usize = 1 << 12;

/// Errors with [`QbcError::CapExceeded`](crate::QbcError::CapExceeded) when
/// `dim` is larger than `cap`.
pub fn check_cap(dim: usize, cap: usize) -> crate::Result<()> {
    if dim > cap {
        Err(crate::QbcError::CapExceeded { dim, cap })
    } else {
        Ok(())
    }
}
