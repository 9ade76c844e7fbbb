use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::linear::{class_matrices, plane_problems, solve_pair, EigenProblem};
use super::{HyperplanePair, KernelPlanes, Planes, TrainSpec, FORMAT_VERSION, MIN_NORMAL_NORM};
use crate::dataio::{stack_rows, LabeledDataset};
use crate::error::{Error, Result};
use crate::kernels::gram;
use crate::{Matrix, Vector};

/// Kernel eigenvalues below this fraction of the largest are dropped from
/// the empirical feature map.
const SPECTRUM_FLOOR: f64 = 1e-10;

/// How the kernel systems measure and regularize the plane parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelNormalization {
    /// Solve the linear systems in the coordinates of the empirical kernel
    /// map `F = K_{·Z} V Λ^{-1/2}`, so `δ` and the unit-norm constraint act
    /// on `‖w‖² + b²` in feature space. With the linear kernel this gives
    /// the same planes as the linear models whenever `Z` spans the inputs.
    #[default]
    FeatureSpace,
    /// Solve directly in the coefficients `α̃ = (α, b)`, with `δ` added to
    /// `K̃ᵀK̃` and `‖α̃‖ = 1`.
    Coefficient,
}

/// Training rows the kernel expansion runs over.
fn expansion_rows(data: &LabeledDataset, spec: &TrainSpec) -> Matrix {
    let u = if spec.classifier.uses_universum() {
        data.u.clone()
    } else {
        Matrix::zeros(0, data.n())
    };
    stack_rows(&[&data.x1, &data.x2, &u])
}

struct Coordinates {
    /// Kernel-block rows mapped to the solve coordinates, `[X1; X2; U]`.
    rows: Matrix,
    /// Maps a solved normal back to expansion coefficients `α`.
    to_alpha: Matrix,
}

fn coordinates(k_zz: &Matrix, normalization: KernelNormalization) -> Result<Coordinates> {
    match normalization {
        KernelNormalization::Coefficient => Ok(Coordinates {
            rows: k_zz.clone(),
            to_alpha: Matrix::identity(k_zz.nrows(), k_zz.nrows()),
        }),
        KernelNormalization::FeatureSpace => {
            let eig = SymmetricEigen::new(k_zz.clone());
            let top = eig.eigenvalues.max();
            if !(top > 0.0) {
                return Err(Error::InvalidInput("kernel matrix has no positive spectrum".into()));
            }
            let mut keep: Vec<usize> = (0..eig.eigenvalues.len())
                .filter(|&i| eig.eigenvalues[i] > SPECTRUM_FLOOR * top)
                .collect();
            keep.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let t = Matrix::from_fn(k_zz.nrows(), keep.len(), |r, c| {
                let i = keep[c];
                let mut v = eig.eigenvectors[(r, i)];
                // fix each eigenvector's sign so the map is reproducible
                let col = eig.eigenvectors.column(i);
                let lead = col
                    .iter()
                    .copied()
                    .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
                if lead < 0.0 {
                    v = -v;
                }
                v / eig.eigenvalues[i].sqrt()
            });
            Ok(Coordinates {
                rows: k_zz * &t,
                to_alpha: t,
            })
        }
    }
}

/// Kernel eigenproblems for `spec`, exposed for inspection. Returns the
/// expansion rows `Z`, `K_ZZ`, the coefficient map and the two problems.
pub fn kernel_problems(data: &LabeledDataset, spec: &TrainSpec) -> Result<(Matrix, Matrix, Matrix, [EigenProblem; 2])> {
    let kernel = spec
        .kernel
        .ok_or_else(|| Error::InvalidInput("kernel training needs a kernel spec".into()))?;
    let z = expansion_rows(data, spec);
    if z.nrows() + 1 > spec.gram_cap {
        return Err(Error::InvalidInput(format!(
            "kernel system of size {} exceeds the cap of {}",
            z.nrows() + 1,
            spec.gram_cap
        )));
    }
    let k_zz = gram(&z, &z, &kernel)?;
    let coords = coordinates(&k_zz, spec.kernel_normalization)?;
    let (m1, m2) = (data.m1(), data.m2());
    let r = coords.rows.ncols();
    let part = |start: usize, len: usize| coords.rows.view((start, 0), (len, r)).into_owned();
    let f1 = part(0, m1);
    let f2 = part(m1, m2);
    let fu = part(m1 + m2, z.nrows() - m1 - m2);
    let mats = class_matrices(&f1, &f2, &fu);
    let problems = plane_problems(&mats, spec);
    Ok((z, k_zz, coords.to_alpha, problems))
}

pub fn train_kernel(data: &LabeledDataset, spec: &TrainSpec) -> Result<HyperplanePair> {
    let kernel = spec
        .kernel
        .ok_or_else(|| Error::InvalidInput("kernel training needs a kernel spec".into()))?;
    let (z, k_zz, to_alpha, problems) = kernel_problems(data, spec)?;
    let [(s1, l1), (s2, l2)] = solve_pair(&problems, spec.classifier)?;
    let r = to_alpha.ncols();
    let finish = |s: &Vector, plane: usize| -> Result<(Vec<f64>, f64, f64)> {
        let alpha = &to_alpha * s.rows(0, r);
        let norm = alpha.dot(&(&k_zz * &alpha)).max(0.0).sqrt();
        if !(norm >= MIN_NORMAL_NORM) {
            return Err(Error::DegeneratePlane(format!(
                "kernel {} plane {plane}",
                spec.classifier
            )));
        }
        Ok((alpha.iter().copied().collect(), s[r], norm))
    };
    let (alpha1, b1, norm1) = finish(&s1, 1)?;
    let (alpha2, b2, norm2) = finish(&s2, 2)?;
    Ok(HyperplanePair {
        format_version: FORMAT_VERSION,
        classifier: spec.classifier,
        hyperparameters: spec.hyperparameters(data.p()),
        eigenvalues: [l1, l2],
        planes: Planes::Kernel(KernelPlanes {
            kernel,
            normalization: spec.kernel_normalization,
            z,
            alpha1,
            b1,
            alpha2,
            b2,
            norm1,
            norm2,
        }),
    })
}
