use serde::{Deserialize, Serialize};

use super::{Classifier, HyperplanePair, Planes, TrainSpec, FORMAT_VERSION, MIN_NORMAL_NORM};
use crate::dataio::LabeledDataset;
use crate::eigsolve::{smallest_eigpair_generalized, smallest_eigpair_standard, EigenSolution};
use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// `[X e]`: rows with a trailing column of ones.
pub fn augment(rows: &Matrix) -> Matrix {
    let (m, n) = rows.shape();
    Matrix::from_fn(m, n + 1, |i, j| if j < n { rows[(i, j)] } else { 1.0 })
}

/// Gram matrices of the augmented class and Universum rows. `δI` is not
/// included; it is added when the eigenproblems are formed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentedClassMatrices {
    pub g: Matrix,
    pub h: Matrix,
    pub p: Matrix,
}

fn augmented_gram(rows: &Matrix) -> Matrix {
    let a = augment(rows);
    a.transpose() * a
}

pub fn class_matrices(x1: &Matrix, x2: &Matrix, u: &Matrix) -> AugmentedClassMatrices {
    let q = x1.ncols() + 1;
    AugmentedClassMatrices {
        g: augmented_gram(x1),
        h: augmented_gram(x2),
        p: if u.nrows() == 0 {
            Matrix::zeros(q, q)
        } else {
            augmented_gram(u)
        },
    }
}

/// `left z = λ right z`, or a standard problem when `right` is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenProblem {
    pub left: Matrix,
    pub right: Option<Matrix>,
}

impl EigenProblem {
    pub fn solve(&self, context: &str) -> Result<EigenSolution> {
        match &self.right {
            Some(b) => smallest_eigpair_generalized(&self.left, b, 0.0, context),
            None => smallest_eigpair_standard(&self.left),
        }
    }

    /// Objective the solution minimizes: Rayleigh ratio or quadratic form
    /// on the unit sphere.
    pub fn objective(&self, z: &Vector) -> f64 {
        let num = z.dot(&(&self.left * z));
        match &self.right {
            Some(b) => num / z.dot(&(b * z)),
            None => num / z.dot(z),
        }
    }
}

fn plus_delta(m: &Matrix, delta: f64) -> Matrix {
    let mut out = m.clone();
    for i in 0..out.nrows() {
        out[(i, i)] += delta;
    }
    out
}

/// The two eigenproblems of `spec.classifier`, plane 1 first.
pub fn plane_problems(m: &AugmentedClassMatrices, spec: &TrainSpec) -> [EigenProblem; 2] {
    let d = spec.delta;
    let g_d = plus_delta(&m.g, d);
    let h_d = plus_delta(&m.h, d);
    match spec.classifier {
        Classifier::Gepsvm => [
            EigenProblem {
                left: g_d,
                right: Some(m.h.clone()),
            },
            EigenProblem {
                left: h_d,
                right: Some(m.g.clone()),
            },
        ],
        Classifier::Ugepsvm => [
            EigenProblem {
                left: g_d,
                right: Some(&m.h + &m.p),
            },
            EigenProblem {
                left: h_d,
                right: Some(&m.g + &m.p),
            },
        ],
        Classifier::Igepsvm => [
            EigenProblem {
                left: g_d - &m.h * spec.nu,
                right: None,
            },
            EigenProblem {
                left: h_d - &m.g * spec.nu,
                right: None,
            },
        ],
        Classifier::Iugepsvm => [
            EigenProblem {
                left: g_d - &m.h * spec.gamma1 - &m.p * spec.psi1,
                right: None,
            },
            EigenProblem {
                left: h_d - &m.g * spec.gamma2 - &m.p * spec.psi2,
                right: None,
            },
        ],
    }
}

/// Solves both problems and returns `(z, λ)` per plane with `‖z‖ = 1`.
pub(super) fn solve_pair(problems: &[EigenProblem; 2], classifier: Classifier) -> Result<[(Vector, f64); 2]> {
    let mut out = Vec::with_capacity(2);
    for (i, p) in problems.iter().enumerate() {
        let sol = p.solve(&format!("{classifier} plane {}", i + 1))?;
        out.push((sol.eigenvector, sol.eigenvalue));
    }
    let second = out.pop().expect("two planes");
    let first = out.pop().expect("two planes");
    Ok([first, second])
}

pub(super) fn train_linear(data: &LabeledDataset, spec: &TrainSpec) -> Result<HyperplanePair> {
    let u = if spec.classifier.uses_universum() {
        data.u.clone()
    } else {
        Matrix::zeros(0, data.n())
    };
    let mats = class_matrices(&data.x1, &data.x2, &u);
    let [(z1, l1), (z2, l2)] = solve_pair(&plane_problems(&mats, spec), spec.classifier)?;
    let n = data.n();
    let split = |z: &Vector, plane: usize| -> Result<(Vec<f64>, f64)> {
        let w: Vec<f64> = z.rows(0, n).iter().copied().collect();
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm >= MIN_NORMAL_NORM) {
            return Err(Error::DegeneratePlane(format!("{} plane {plane}", spec.classifier)));
        }
        Ok((w, z[n]))
    };
    let (w1, b1) = split(&z1, 1)?;
    let (w2, b2) = split(&z2, 2)?;
    Ok(HyperplanePair {
        format_version: FORMAT_VERSION,
        classifier: spec.classifier,
        hyperparameters: spec.hyperparameters(data.p()),
        eigenvalues: [l1, l2],
        planes: Planes::Linear { w1, b1, w2, b2 },
    })
}
