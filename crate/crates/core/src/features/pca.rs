use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::eigsolve::apply_sign_convention;
use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// Relative eigenvalue floor below which a direction counts as empty.
const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaBasis {
    pub mean: Vector,
    /// `d × k`, orthonormal columns in decreasing-variance order.
    pub components: Matrix,
    pub explained_variance: Vec<f64>,
    /// Set when fewer than `k` directions carry variance; the missing
    /// ones are completed by an arbitrary orthonormal complement.
    pub rank_deficient: bool,
}

impl PcaBasis {
    pub fn n_components(&self) -> usize {
        self.components.ncols()
    }

    pub fn transform(&self, rows: &Matrix) -> Result<Matrix> {
        if rows.ncols() != self.mean.len() {
            return Err(Error::DimensionMismatch(format!(
                "basis fitted on {} features, got {}",
                self.mean.len(),
                rows.ncols()
            )));
        }
        Ok(center(rows, &self.mean) * &self.components)
    }
}

pub(crate) fn column_mean(rows: &Matrix) -> Vector {
    rows.row_mean().transpose()
}

pub(crate) fn center(rows: &Matrix, mean: &Vector) -> Matrix {
    let mut out = rows.clone();
    for mut r in out.row_iter_mut() {
        r -= mean.transpose();
    }
    out
}

/// Sorted (descending) eigenpairs of a symmetric matrix.
fn sorted_eigen(m: Matrix) -> (Vec<f64>, Matrix) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// Extend `basis` (orthonormal columns) to `k` columns by Gram-Schmidt
/// against the standard basis.
fn complete_basis(mut cols: Vec<Vector>, d: usize, k: usize) -> Vec<Vector> {
    let mut e = 0;
    while cols.len() < k && e < d {
        let mut v = Vector::zeros(d);
        v[e] = 1.0;
        e += 1;
        for _ in 0..2 {
            for c in &cols {
                let p = c.dot(&v);
                v.axpy(-p, c, 1.0);
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            cols.push(v / n);
        }
    }
    cols
}

/// Principal component basis of `rows` (samples × features). Uses the
/// `m × m` Gram matrix instead of the covariance when features outnumber
/// samples.
pub fn pca_fit(rows: &Matrix, n_components: usize) -> Result<PcaBasis> {
    let (m, d) = rows.shape();
    if m < 2 {
        return Err(Error::InvalidInput("PCA needs at least two samples".into()));
    }
    if n_components == 0 || n_components > d.min(m) {
        return Err(Error::InvalidInput(format!(
            "cannot extract {n_components} components from {m} samples of {d} features"
        )));
    }
    if rows.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("PCA input".into()));
    }
    let mean = column_mean(rows);
    let xc = center(rows, &mean);
    let scale = (m - 1) as f64;

    let (values, mut cols): (Vec<f64>, Vec<Vector>) = if d <= m {
        let (vals, vecs) = sorted_eigen(xc.transpose() * &xc / scale);
        let cols = (0..n_components).map(|i| vecs.column(i).into_owned()).collect();
        (vals[..n_components].to_vec(), cols)
    } else {
        let (vals, u) = sorted_eigen(&xc * xc.transpose() / scale);
        let floor = RANK_TOL * vals[0].max(0.0);
        let mut cols = Vec::new();
        for i in 0..n_components {
            if vals[i] <= floor || vals[i] <= 0.0 {
                break;
            }
            let v = xc.transpose() * u.column(i) / (scale * vals[i]).sqrt();
            let n = v.norm();
            cols.push(v / n);
        }
        (vals[..n_components].to_vec(), cols)
    };

    let top = values[0].max(0.0);
    let mut explained: Vec<f64> = values
        .iter()
        .map(|&v| if v <= RANK_TOL * top || v <= 0.0 { 0.0 } else { v })
        .collect();
    let rank_deficient = explained.contains(&0.0);
    if cols.len() < n_components {
        cols = complete_basis(cols, d, n_components);
    }
    explained.truncate(cols.len());
    if rank_deficient {
        log::warn!("PCA input has rank below the requested {n_components} components");
    }
    for c in cols.iter_mut() {
        apply_sign_convention(c);
    }
    Ok(PcaBasis {
        mean,
        components: Matrix::from_columns(&cols),
        explained_variance: explained,
        rank_deficient,
    })
}

pub fn pca_fit_transform(rows: &Matrix, n_components: usize) -> Result<(Matrix, PcaBasis)> {
    let basis = pca_fit(rows, n_components)?;
    Ok((basis.transform(rows)?, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(m: usize, d: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(m, d, |_, j| rng.random_range(-1.0..1.0) * (j + 1) as f64)
    }

    /// Eigenvalues of a symmetric 3×3 matrix from its characteristic
    /// polynomial (trigonometric form of the cubic roots).
    fn eig3(a: &Matrix) -> [f64; 3] {
        let p1 = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
        let q = a.trace() / 3.0;
        let p2 = (a[(0, 0)] - q).powi(2) + (a[(1, 1)] - q).powi(2) + (a[(2, 2)] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let b = (a - Matrix::identity(3, 3) * q) / p;
        let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        [e1, 3.0 * q - e1 - e3, e3]
    }

    #[test]
    fn orthonormal_and_decorrelated() {
        for (m, d) in [(40, 6), (10, 30)] {
            let x = random(m, d, 3);
            let k = 5;
            let (t, basis) = pca_fit_transform(&x, k).unwrap();
            let gram = basis.components.transpose() * &basis.components;
            assert_abs_diff_eq!(gram, Matrix::identity(k, k), epsilon = 1e-10);
            let cov = t.transpose() * &t / (m - 1) as f64;
            for i in 0..k {
                for j in 0..k {
                    let expected = if i == j { basis.explained_variance[i] } else { 0.0 };
                    assert_abs_diff_eq!(cov[(i, j)], expected, epsilon = 1e-9 * (1.0 + cov[(0, 0)]));
                }
            }
            assert!(basis.explained_variance.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn gram_route_matches_covariance_route() {
        let x = random(12, 8, 9);
        let direct = pca_fit(&x, 4).unwrap();
        // pad with zero columns to force d > m
        let padded = Matrix::from_fn(12, 20, |i, j| if j < 8 { x[(i, j)] } else { 0.0 });
        let gram = pca_fit(&padded, 4).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(
                direct.explained_variance[i],
                gram.explained_variance[i],
                epsilon = 1e-10
            );
            for r in 0..8 {
                assert_abs_diff_eq!(direct.components[(r, i)], gram.components[(r, i)], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn matches_characteristic_polynomial() {
        let x = random(50, 3, 11);
        let basis = pca_fit(&x, 3).unwrap();
        let xc = center(&x, &column_mean(&x));
        let cov = xc.transpose() * &xc / 49.0;
        let roots = eig3(&cov);
        for i in 0..3 {
            assert_abs_diff_eq!(basis.explained_variance[i], roots[i], epsilon = 1e-10);
        }
    }

    #[test]
    fn collinear_points() {
        let x = Matrix::from_fn(20, 2, |i, j| if j == 0 { i as f64 } else { 2.0 * i as f64 });
        let basis = pca_fit(&x, 2).unwrap();
        assert!(basis.rank_deficient);
        assert_eq!(basis.explained_variance[1], 0.0);
        let dir = basis.components.column(0);
        assert_abs_diff_eq!(dir[1] / dir[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(pca_fit(&random(5, 3, 1), 4).is_err());
        assert!(pca_fit(&random(1, 3, 1), 1).is_err());
        assert!(pca_fit(&random(5, 3, 1), 0).is_err());
    }
}
