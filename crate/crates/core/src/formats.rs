//! JSON encodings shared by the ensemble, POVM and protocol documents.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::Matrix;

/// Square matrix as rows of `[re, im]` pairs.
pub type MatrixDocument = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_document(m: &Matrix) -> MatrixDocument {
    (0..m.rows()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn matrix_from_document(doc: &MatrixDocument) -> Result<Matrix> {
    let n = doc.len();
    if n == 0 {
        return Err(Error::Schema("empty matrix".into()));
    }
    let mut data = Vec::with_capacity(n * n);
    for row in doc {
        if row.len() != n {
            return Err(Error::Schema(format!("matrix row of length {} in a {n}x{n} matrix", row.len())));
        }
        for &[re, im] in row {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Schema("non-finite matrix entry".into()));
            }
            data.push(Complex::new(re, im));
        }
    }
    Ok(Matrix::from_vec(n, n, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = Matrix::from_fn(3, 3, |i, j| Complex::new(0.1 * i as f64 + 1.0 / 3.0, -(j as f64).sqrt()));
        let text = serde_json::to_string(&matrix_to_document(&m)).unwrap();
        let doc: MatrixDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(matrix_from_document(&doc).unwrap(), m);
    }

    #[test]
    fn rejects_ragged_rows() {
        let doc = vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0]]];
        assert!(matrix_from_document(&doc).is_err());
    }
}
