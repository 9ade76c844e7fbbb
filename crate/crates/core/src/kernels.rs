//! Linear and Gaussian (RBF) kernels and Gram blocks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    /// `K(x, y) = exp(-‖x − y‖² / 2σ²)`
    Rbf {
        sigma: f64,
    },
}

impl KernelSpec {
    pub fn rbf(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidInput(format!("rbf width {sigma} must be positive")));
        }
        Ok(KernelSpec::Rbf { sigma })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Rbf { sigma } => Self::rbf(sigma).map(|_| ()),
        }
    }

    pub fn sigma(&self) -> Option<f64> {
        match *self {
            KernelSpec::Linear => None,
            KernelSpec::Rbf { sigma } => Some(sigma),
        }
    }

    /// Kernel value between two feature rows given as slices.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => x.iter().zip(y).map(|(a, b)| a * b).sum(),
            KernelSpec::Rbf { sigma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * sigma * sigma)).exp()
            }
        }
    }
}

/// Which part of the training data a Gram block indexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockSource {
    X1,
    X2,
    U,
    Z,
    Query,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramBlock {
    pub values: Matrix,
    pub row_source: BlockSource,
    pub col_source: BlockSource,
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Kernel matrix with entry `(i, j) = K(aᵢ, bⱼ)`. Rows are filled in
/// parallel; each entry is computed independently of the schedule.
pub fn gram(rows_a: &Matrix, rows_b: &Matrix, spec: &KernelSpec) -> Result<Matrix> {
    spec.validate()?;
    if rows_a.ncols() != rows_b.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "kernel operands have {} and {} features",
            rows_a.ncols(),
            rows_b.ncols()
        )));
    }
    if rows_a.iter().chain(rows_b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("kernel operand".into()));
    }
    let a = rows_of(rows_a);
    let b = rows_of(rows_b);
    let same = std::ptr::eq(rows_a, rows_b);
    let filled: Vec<Vec<f64>> = a
        .par_iter()
        .map(|x| b.iter().map(|y| spec.eval(x, y)).collect())
        .collect();
    let mut out = Matrix::from_fn(a.len(), b.len(), |i, j| filled[i][j]);
    if same {
        // Mirror the upper triangle so the block is exactly symmetric.
        for i in 0..out.nrows() {
            for j in 0..i {
                out[(i, j)] = out[(j, i)];
            }
        }
    }
    Ok(out)
}

/// Gram block tagged with the data parts it was computed from.
pub fn gram_block(
    rows_a: &Matrix,
    row_source: BlockSource,
    rows_b: &Matrix,
    col_source: BlockSource,
    spec: &KernelSpec,
) -> Result<GramBlock> {
    Ok(GramBlock {
        values: gram(rows_a, rows_b, spec)?,
        row_source,
        col_source,
    })
}

/// Mean of all N² pairwise squared Euclidean distances. Falls back to 1.0
/// (with a warning) when the rows are all identical.
pub fn default_sigma(rows: &Matrix) -> Result<f64> {
    let n = rows.nrows();
    if n < 2 {
        return Err(Error::InvalidInput("default sigma needs at least two rows".into()));
    }
    // Σᵢⱼ‖xᵢ − xⱼ‖² = 2N Σᵢ‖xᵢ‖² − 2‖Σᵢxᵢ‖², evaluated on centred rows.
    let mean = rows.row_mean();
    let mut sq = 0.0;
    for i in 0..n {
        sq += (rows.row(i) - &mean).norm_squared();
    }
    let sigma = 2.0 * sq / n as f64;
    if sigma > 0.0 && sigma.is_finite() {
        Ok(sigma)
    } else {
        log::warn!("all rows identical; default kernel width falls back to 1.0");
        Ok(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn rbf_self_similarity_is_one() {
        let x = Matrix::from_row_slice(3, 2, &[0.3, -2.0, 5.0, 1.0, 1e3, 7.0]);
        let k = gram(&x, &x, &KernelSpec::rbf(0.7).unwrap()).unwrap();
        for i in 0..3 {
            assert_eq!(k[(i, i)], 1.0);
        }
    }

    #[test]
    fn linear_dot_product() {
        let a = Matrix::from_row_slice(1, 2, &[1.0, 2.0]);
        let b = Matrix::from_row_slice(1, 2, &[3.0, 4.0]);
        assert_eq!(gram(&a, &b, &KernelSpec::Linear).unwrap()[(0, 0)], 11.0);
    }

    #[test]
    fn rbf_known_value() {
        let a = Matrix::from_row_slice(1, 1, &[0.0]);
        let b = Matrix::from_row_slice(1, 1, &[2.0]);
        let k = gram(&a, &b, &KernelSpec::rbf(1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(k[(0, 0)], 0.135_335_283_236_612_7, epsilon = 1e-15);
    }

    #[test]
    fn default_sigma_examples() {
        let two = Matrix::from_row_slice(2, 1, &[0.0, 2.0]);
        assert_abs_diff_eq!(default_sigma(&two).unwrap(), 2.0, epsilon = 1e-14);
        let three = Matrix::from_row_slice(3, 1, &[0.0, 0.0, 3.0]);
        assert_abs_diff_eq!(default_sigma(&three).unwrap(), 4.0, epsilon = 1e-14);
        let same = Matrix::from_element(4, 3, 2.5);
        assert_eq!(default_sigma(&same).unwrap(), 1.0);
        assert!(default_sigma(&Matrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn errors() {
        let a = Matrix::zeros(2, 2);
        let b = Matrix::zeros(2, 3);
        assert!(gram(&a, &b, &KernelSpec::Linear).is_err());
        assert!(KernelSpec::rbf(0.0).is_err());
        let mut c = Matrix::zeros(2, 2);
        c[(1, 1)] = f64::INFINITY;
        assert!(matches!(gram(&c, &c, &KernelSpec::Linear), Err(Error::NonFinite(_))));
    }

    fn matrix_strategy() -> impl Strategy<Value = Matrix> {
        (1usize..8, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-5.0f64..5.0, r * c).prop_map(move |v| Matrix::from_row_slice(r, c, &v))
        })
    }

    proptest! {
        #[test]
        fn gram_properties(a in matrix_strategy(), sigma in 0.1f64..10.0) {
            let rbf = KernelSpec::rbf(sigma).unwrap();
            let k = gram(&a, &a, &rbf).unwrap();
            prop_assert_eq!(&k, &k.transpose());
            prop_assert!(k.iter().all(|&v| (0.0..=1.0).contains(&v)));
            let eig = nalgebra::SymmetricEigen::new(k.clone());
            let min = eig.eigenvalues.min();
            prop_assert!(min >= -1e-8 * k.trace() / k.nrows() as f64);

            let lin = gram(&a, &a, &KernelSpec::Linear).unwrap();
            let direct = &a * a.transpose();
            for (x, y) in lin.iter().zip(direct.iter()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
        }
    }
}
