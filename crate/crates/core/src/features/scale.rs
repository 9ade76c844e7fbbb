//! Per-column z-scoring fitted on training rows.

use serde::{Deserialize, Serialize};

use super::pca::column_mean;
use crate::error::{Error, Result};
use crate::Matrix;

/// Columns with a deviation at or below this are only centred.
const MIN_SCALE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    /// Column means and sample deviations of `rows` (at least two).
    pub fn fit(rows: &Matrix) -> Result<Self> {
        if rows.nrows() < 2 {
            return Err(Error::InvalidInput("standardizing needs at least two rows".into()));
        }
        let mean = column_mean(rows);
        let m = rows.nrows() as f64;
        let scale = (0..rows.ncols())
            .map(|j| {
                let var = rows.column(j).iter().map(|v| (v - mean[j]).powi(2)).sum::<f64>() / (m - 1.0);
                let sd = var.sqrt();
                if sd > MIN_SCALE {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardizer {
            mean: mean.iter().copied().collect(),
            scale,
        })
    }

    pub fn transform(&self, rows: &Matrix) -> Result<Matrix> {
        if rows.ncols() != self.mean.len() {
            return Err(Error::DimensionMismatch(format!(
                "standardizer fitted on {} columns, got {}",
                self.mean.len(),
                rows.ncols()
            )));
        }
        Ok(Matrix::from_fn(rows.nrows(), rows.ncols(), |i, j| {
            (rows[(i, j)] - self.mean[j]) / self.scale[j]
        }))
    }
}
