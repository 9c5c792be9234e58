//! Reusable linear least-squares solve for a fixed design matrix.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub(crate) struct LeastSquares {
    pinv: DMatrix<f64>,
}

impl LeastSquares {
    pub fn new(design: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = design.shape();
        let svd = design.svd(true, true);
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let tol = smax * 1e-10 * rows.max(cols) as f64;
        let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
        if rank < cols {
            return Err(Error::RankDeficient { rank, unknowns: cols });
        }
        let pinv = svd.pseudo_inverse(tol).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(Self { pinv })
    }

    pub fn solve(&self, y: &[f64]) -> DVector<f64> {
        &self.pinv * DVector::from_column_slice(y)
    }
}
