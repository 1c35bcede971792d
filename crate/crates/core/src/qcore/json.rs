//! JSON encodings shared with the command line: complex numbers are
//! `[re, im]` pairs, matrices are arrays of rows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{DensityOp, Ket};
use super::CMatrix;
use crate::error::{QbcError, Result};

pub type ComplexPair = [f64; 2];

pub fn to_pairs<'a>(values: impl IntoIterator<Item = &'a Complex64>) -> Vec<ComplexPair> {
    values.into_iter().map(|z| [z.re, z.im]).collect()
}

pub fn from_pairs(values: &[ComplexPair]) -> Vec<Complex64> {
    values.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

/// Row-major matrix encoding.
pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<ComplexPair>> {
    m.row_iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<ComplexPair>]) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(QbcError::Dimension("ragged matrix rows".into()));
    }
    let flat: Vec<Complex64> = rows.iter().flat_map(|r| from_pairs(r)).collect();
    Ok(CMatrix::from_row_slice(nrows, ncols, &flat))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KetJson {
    /// Subsystem dimensions; defaults to a single system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    pub amplitudes: Vec<ComplexPair>,
}

impl From<&Ket> for KetJson {
    fn from(k: &Ket) -> Self {
        KetJson { dims: Some(k.dims().to_vec()), amplitudes: to_pairs(k.amplitudes().iter()) }
    }
}

impl TryFrom<&KetJson> for Ket {
    type Error = QbcError;
    fn try_from(j: &KetJson) -> Result<Ket> {
        let amps = nalgebra::DVector::from_vec(from_pairs(&j.amplitudes));
        let dims = j.dims.clone().unwrap_or_else(|| vec![amps.len()]);
        Ket::new(amps, dims)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    pub matrix: Vec<Vec<ComplexPair>>,
}

impl From<&DensityOp> for DensityJson {
    fn from(r: &DensityOp) -> Self {
        DensityJson { dims: Some(r.dims().to_vec()), matrix: matrix_to_rows(r.matrix()) }
    }
}

impl TryFrom<&DensityJson> for DensityOp {
    type Error = QbcError;
    fn try_from(j: &DensityJson) -> Result<DensityOp> {
        let m = matrix_from_rows(&j.matrix)?;
        let dims = j.dims.clone().unwrap_or_else(|| vec![m.nrows()]);
        DensityOp::new(m, dims)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::circle::GreatCircle;

    #[test]
    fn matrix_rows_are_row_major() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.5), Complex64::new(3.0, 0.0), Complex64::new(4.0, -1.0)],
        );
        let rows = matrix_to_rows(&m);
        assert_eq!(rows[0][1], [2.0, 0.5]);
        assert_eq!(rows[1][0], [3.0, 0.0]);
        assert_eq!(matrix_from_rows(&rows).unwrap(), m);
        let text = serde_json::to_string(&rows).unwrap();
        assert_eq!(text, "[[[1.0,0.0],[2.0,0.5]],[[3.0,0.0],[4.0,-1.0]]]");
    }

    #[test]
    fn ket_json_validates_norm() {
        let j: KetJson = serde_json::from_str(r#"{"amplitudes": [[1,0],[1,0]]}"#).unwrap();
        assert!(Ket::try_from(&j).is_err());
        let k = GreatCircle::standard().state(0.3);
        let back = Ket::try_from(&KetJson::from(&k)).unwrap();
        assert_eq!(back, k);
    }
}
