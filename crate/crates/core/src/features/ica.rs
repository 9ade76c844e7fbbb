use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::pca::{center, pca_fit};
use crate::eigsolve::apply_sign_convention;
use crate::error::{Error, Result};
use crate::{Matrix, Vector};

pub const MAX_ITER: usize = 500;
pub const TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcaBasis {
    pub mean: Vector,
    /// `d × k`; a centred row times this matrix gives its source estimates.
    pub unmixing: Matrix,
    pub converged: bool,
    pub iterations: Vec<usize>,
}

impl IcaBasis {
    pub fn n_components(&self) -> usize {
        self.unmixing.ncols()
    }

    pub fn transform(&self, rows: &Matrix) -> Result<Matrix> {
        if rows.ncols() != self.mean.len() {
            return Err(Error::DimensionMismatch(format!(
                "basis fitted on {} features, got {}",
                self.mean.len(),
                rows.ncols()
            )));
        }
        Ok(center(rows, &self.mean) * &self.unmixing)
    }
}

/// FastICA with deflation and the `tanh` contrast. Data are whitened to
/// `n_components` dimensions through PCA first; each unmixing direction
/// is started from a seeded Gaussian draw.
pub fn ica_fit(rows: &Matrix, n_components: usize, seed: u64) -> Result<IcaBasis> {
    let pca = pca_fit(rows, n_components)?;
    let k = pca.explained_variance.iter().take_while(|&&v| v > 0.0).count();
    if k == 0 {
        return Err(Error::InvalidInput("ICA input has no variance".into()));
    }
    if k < n_components {
        log::warn!("ICA whitening keeps only {k} of {n_components} directions");
    }
    // whitening: z = (x − μ) E D^{-1/2}
    let whitening = Matrix::from_fn(rows.ncols(), k, |r, c| {
        pca.components[(r, c)] / pca.explained_variance[c].sqrt()
    });
    let z = center(rows, &pca.mean) * &whitening;
    let m = z.nrows() as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<Vector> = Vec::with_capacity(k);
    let mut iterations = Vec::with_capacity(k);
    let mut converged = true;
    for _ in 0..k {
        let mut w = Vector::from_fn(k, |_, _| StandardNormal.sample(&mut rng));
        deflate(&mut w, &found);
        w.normalize_mut();
        let mut done = false;
        let mut iter = 0;
        while iter < MAX_ITER {
            iter += 1;
            let proj = &z * &w;
            let g = proj.map(f64::tanh);
            let g_prime_mean = g.iter().map(|t| 1.0 - t * t).sum::<f64>() / m;
            let mut next = z.transpose() * &g / m - &w * g_prime_mean;
            deflate(&mut next, &found);
            let n = next.norm();
            if !(n > 0.0) || !n.is_finite() {
                break;
            }
            next /= n;
            let change = (1.0 - next.dot(&w).abs()).abs();
            w = next;
            if change < TOL {
                done = true;
                break;
            }
        }
        if !done {
            log::warn!(
                "FastICA component {} did not converge in {MAX_ITER} iterations",
                found.len()
            );
            converged = false;
        }
        iterations.push(iter);
        apply_sign_convention(&mut w);
        found.push(w);
    }
    let w = Matrix::from_columns(&found);
    Ok(IcaBasis {
        mean: pca.mean,
        unmixing: whitening * w,
        converged,
        iterations,
    })
}

fn deflate(w: &mut Vector, found: &[Vector]) {
    for f in found {
        let p = f.dot(w);
        w.axpy(-p, f, 1.0);
    }
}

pub fn ica_fit_transform(rows: &Matrix, n_components: usize, seed: u64) -> Result<(Matrix, IcaBasis)> {
    let basis = ica_fit(rows, n_components, seed)?;
    Ok((basis.transform(rows)?, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let mut sab = 0.0;
        let mut saa = 0.0;
        let mut sbb = 0.0;
        for (x, y) in a.iter().zip(b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma) * (x - ma);
            sbb += (y - mb) * (y - mb);
        }
        sab / (saa * sbb).sqrt()
    }

    #[test]
    fn recovers_uniform_sources() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let m = 2000;
        let s = Matrix::from_fn(m, 2, |_, _| rng.random_range(-1.0..1.0));
        let mix = Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let x = &s * mix.transpose();
        let (est, basis) = ica_fit_transform(&x, 2, 7).unwrap();
        assert!(basis.converged);
        for src in 0..2 {
            let truth: Vec<f64> = s.column(src).iter().copied().collect();
            let best = (0..2)
                .map(|c| {
                    let e: Vec<f64> = est.column(c).iter().copied().collect();
                    corr(&truth, &e).abs()
                })
                .fold(0.0, f64::max);
            assert!(best >= 0.95, "source {src}: best |corr| {best}");
        }
    }

    #[test]
    fn outputs_are_white_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = Matrix::from_fn(300, 4, |_, j| rng.random_range(-1.0..1.0) * (1 + j) as f64);
        let (a, _) = ica_fit_transform(&x, 3, 1).unwrap();
        let (b, _) = ica_fit_transform(&x, 3, 1).unwrap();
        assert_eq!(a, b);
        let cov = a.transpose() * &a / 299.0;
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((cov[(i, j)] - expected).abs() < 1e-8);
            }
        }
    }
}
