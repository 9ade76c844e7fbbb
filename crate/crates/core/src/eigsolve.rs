//! Smallest eigenpairs of dense symmetric standard and generalized problems.
//!
//! Every classifier in this crate reduces to one of
//!
//! ```text
//! A z = λ z            (difference forms)
//! A z = λ (B + ρI) z   (ratio forms, B positive semidefinite)
//! ```
//!
//! and keeps the eigenvector of the algebraically smallest eigenvalue. The
//! generalized problem is reduced to a standard one through the Cholesky
//! factor of the right operand: with `B + ρI = L Lᵀ`, the pair becomes
//! `L⁻¹ A L⁻ᵀ y = λ y` and `z = L⁻ᵀ y`. When the right operand is singular,
//! ρ is escalated from `1e-12·tr(B)/q` by factors of ten. When `A` is
//! itself positive definite the same pencil is also tried through `A`'s
//! factor (largest `μ = 1/λ`), which stays accurate when `B` is nearly
//! singular; the first candidate passing the residual check is returned.
//!
//! Returned vectors have unit 2-norm and their largest-magnitude component
//! is positive (first one on ties), so solutions are reproducible.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// Relative factor applied to `tr(B)/q` for the first automatic ridge.
pub const BASE_RIDGE_FACTOR: f64 = 1e-12;
/// Number of ×10 escalations after the first automatic ridge.
pub const RIDGE_ESCALATIONS: usize = 3;
/// Residual tolerance factor: `‖Az − λBz‖ ≤ tol·(‖A‖_F + |λ|·‖B‖_F)`.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenSolution {
    pub eigenvalue: f64,
    pub eigenvector: Vector,
    pub residual: f64,
    /// Ridge actually added to the right operand (0 for standard problems).
    pub ridge: f64,
}

impl EigenSolution {
    /// Upper bound the residual is checked against.
    pub fn residual_bound(a: &Matrix, b_fro: f64, eigenvalue: f64) -> f64 {
        RESIDUAL_TOL * (a.norm() + eigenvalue.abs() * b_fro)
    }
}

fn check_square(m: &Matrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidInput(format!("{what} is empty")));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(what.to_string()));
    }
    Ok(())
}

/// `(M + Mᵀ)/2`.
pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
pub fn apply_sign_convention(v: &mut Vector) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
}

fn smallest_of(eig: &SymmetricEigen<f64, nalgebra::Dyn>) -> (f64, Vector) {
    let mut idx = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[idx] {
            idx = i;
        }
    }
    (eig.eigenvalues[idx], eig.eigenvectors.column(idx).into_owned())
}

/// Smallest eigenpair of the symmetric matrix `a`.
pub fn smallest_eigpair_standard(a: &Matrix) -> Result<EigenSolution> {
    check_square(a, "left operand")?;
    let a = symmetrize(a);
    let eig = SymmetricEigen::new(a.clone());
    let (_, mut z) = smallest_of(&eig);
    z.normalize_mut();
    apply_sign_convention(&mut z);
    let lambda = z.dot(&(&a * &z));
    let residual = (&a * &z - &z * lambda).norm();
    let bound = EigenSolution::residual_bound(&a, (a.nrows() as f64).sqrt(), lambda);
    if !(residual <= bound) {
        return Err(Error::Residual { residual, bound });
    }
    Ok(EigenSolution {
        eigenvalue: lambda,
        eigenvector: z,
        residual,
        ridge: 0.0,
    })
}

/// Lower Cholesky factor, or `None` when a pivot falls below the
/// relative positive-definiteness threshold.
pub fn cholesky_lower(b: &Matrix) -> Option<Matrix> {
    let q = b.nrows();
    let max_diag = (0..q).map(|i| b[(i, i)].abs()).fold(0.0, f64::max);
    let threshold = q as f64 * f64::EPSILON * max_diag;
    let mut l = Matrix::zeros(q, q);
    for j in 0..q {
        let mut d = b[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > threshold) {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..q {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

fn ridge_schedule(b: &Matrix, supplied: f64) -> Vec<f64> {
    let q = b.nrows() as f64;
    let first = if supplied > 0.0 {
        supplied * 10.0
    } else {
        BASE_RIDGE_FACTOR * b.trace() / q
    };
    let mut out = vec![supplied];
    let mut r = first;
    for _ in 0..=RIDGE_ESCALATIONS {
        if r > 0.0 && r.is_finite() {
            out.push(r);
        }
        r *= 10.0;
    }
    out
}

/// Smallest eigenpair of `a z = λ (b + ridge·I) z`. `context` names the
/// caller in the singular-denominator error.
pub fn smallest_eigpair_generalized(a: &Matrix, b: &Matrix, ridge: f64, context: &str) -> Result<EigenSolution> {
    check_square(a, "left operand")?;
    check_square(b, "right operand")?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "left operand {0}x{0}, right operand {1}x{1}",
            a.nrows(),
            b.nrows()
        )));
    }
    if !(ridge >= 0.0) || !ridge.is_finite() {
        return Err(Error::InvalidInput(format!(
            "ridge {ridge} must be finite and non-negative"
        )));
    }
    let a = symmetrize(a);
    let b = symmetrize(b);
    let q = a.nrows();

    let mut last = ridge;
    let mut residual_failure = None;
    let a_factor = cholesky_lower(&a);
    for r in ridge_schedule(&b, ridge) {
        last = r;
        let mut b_eff = b.clone();
        for i in 0..q {
            b_eff[(i, i)] += r;
        }
        let Some(l) = cholesky_lower(&b_eff) else {
            continue;
        };
        // With A positive definite the pencil is better conditioned read
        // backwards, `(B + ρI) z = μ A z` with λ = 1/μ_max, since a nearly
        // singular right operand then sits on the inverted side.
        let candidates = [
            a_factor.as_ref().and_then(|la| largest_inverted(la, &b_eff)),
            Some(smallest_reduced(&l, &a)),
        ];
        for mut z in candidates.into_iter().flatten() {
            z.normalize_mut();
            apply_sign_convention(&mut z);
            let bz = &b_eff * &z;
            let lambda = z.dot(&(&a * &z)) / z.dot(&bz);
            let residual = (&a * &z - bz * lambda).norm();
            let bound = EigenSolution::residual_bound(&a, b_eff.norm(), lambda);
            if residual <= bound {
                return Ok(EigenSolution {
                    eigenvalue: lambda,
                    eigenvector: z,
                    residual,
                    ridge: r,
                });
            }
            residual_failure = Some(Error::Residual { residual, bound });
        }
    }
    Err(residual_failure.unwrap_or(Error::SingularDenominator {
        context: context.to_string(),
        ridge: last,
    }))
}

/// `L⁻¹ M L⁻ᵀ` for a lower Cholesky factor `L`.
fn congruence(l: &Matrix, m: &Matrix) -> Matrix {
    let l_inv_m = l
        .solve_lower_triangular(m)
        .expect("Cholesky factor has a positive diagonal");
    let c = l
        .solve_lower_triangular(&l_inv_m.transpose())
        .expect("Cholesky factor has a positive diagonal");
    symmetrize(&c)
}

/// Eigenvector of the smallest λ in `A z = λ L Lᵀ z`.
fn smallest_reduced(l: &Matrix, a: &Matrix) -> Vector {
    let (_, y) = smallest_of(&SymmetricEigen::new(congruence(l, a)));
    l.transpose()
        .solve_upper_triangular(&y)
        .expect("Cholesky factor has a positive diagonal")
}

/// Eigenvector of the largest μ in `B z = μ L Lᵀ z` (L the factor of A),
/// or `None` when that μ is not positive.
fn largest_inverted(l: &Matrix, b: &Matrix) -> Option<Vector> {
    let eig = SymmetricEigen::new(congruence(l, b));
    let mut idx = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > eig.eigenvalues[idx] {
            idx = i;
        }
    }
    if !(eig.eigenvalues[idx] > 0.0) {
        return None;
    }
    let y = eig.eigenvectors.column(idx).into_owned();
    l.transpose().solve_upper_triangular(&y)
}

/// `zᵀAz / zᵀBz`, or `zᵀAz / zᵀz` when `b` is `None`.
pub fn rayleigh_quotient(a: &Matrix, b: Option<&Matrix>, z: &Vector) -> Result<f64> {
    if a.nrows() != z.len() || a.ncols() != z.len() {
        return Err(Error::DimensionMismatch(format!(
            "operand {}x{} against vector of length {}",
            a.nrows(),
            a.ncols(),
            z.len()
        )));
    }
    let num = z.dot(&(a * z));
    let den = match b {
        Some(b) => {
            if b.shape() != a.shape() {
                return Err(Error::DimensionMismatch("operand shapes differ".into()));
            }
            z.dot(&(b * z))
        }
        None => z.dot(z),
    };
    if !(den.abs() >= 1e-300) {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}
