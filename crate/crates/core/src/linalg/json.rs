//! JSON wire format for complex matrices, shared by all modules:
//! `{"rows": n, "cols": m, "re": [[...]], "im": [[...]]}` with row-major
//! coefficient arrays.

use super::CMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = m.nrows();
        let cols = m.ncols();
        let re = (0..rows)
            .map(|i| (0..cols).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..rows)
            .map(|i| (0..cols).map(|j| m[(i, j)].im).collect())
            .collect();
        MatrixJson { rows, cols, re, im }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let shape_ok = |v: &Vec<Vec<f64>>| {
            v.len() == self.rows && v.iter().all(|row| row.len() == self.cols)
        };
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Input(format!(
                "matrix payload does not match declared {}x{} shape",
                self.rows, self.cols
            )));
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |i, j| {
            Complex64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

impl TryFrom<&MatrixJson> for CMatrix {
    type Error = Error;
    fn try_from(value: &MatrixJson) -> Result<CMatrix> {
        value.to_matrix()
    }
}

impl From<&CMatrix> for MatrixJson {
    fn from(value: &CMatrix) -> MatrixJson {
        MatrixJson::from_matrix(value)
    }
}
