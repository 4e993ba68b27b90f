//! Rational expressions in the eigenvalues of a simple spectrum: gradients
//! of the eigenvalues along a constrained family, the sign quantity `L(r)`,
//! the coefficients `u_ij`, `u_i`, and the densities built from them.
//!
//! Eigenvalues are passed as slices and used in the given order; indices are
//! 0-based. Empty products are 1.

mod limits;

pub use limits::{
    assertion_scan, boundary_limit, neville_extrapolate, AssertionReport, IndexSummary,
    DIVERGENCE_OFFSET, DIVERGENCE_THRESHOLD, EXTRAPOLATION_FLOOR,
    ScanSample,
};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Eigenvalues closer than this are treated as repeated.
pub const MIN_GAP: f64 = 1e-12;

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub(crate) fn sign_pow(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Fails with `RepeatedEigenvalue` if any two entries are within [`MIN_GAP`].
pub fn check_distinct(lambda: &[f64]) -> Result<()> {
    if let Some(i) = lambda.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("eigenvalue {i} is not finite")));
    }
    for i in 0..lambda.len() {
        for j in i + 1..lambda.len() {
            let gap = (lambda[i] - lambda[j]).abs();
            if gap < MIN_GAP {
                return Err(Error::RepeatedEigenvalue { i, j, gap });
            }
        }
    }
    Ok(())
}

fn min_gap(lambda: &[f64]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..lambda.len() {
        for j in i + 1..lambda.len() {
            g = g.min((lambda[i] - lambda[j]).abs());
        }
    }
    g
}

/// `∏_{k≠i} (λ_k - λ_i)`.
fn gap_product(lambda: &[f64], i: usize) -> f64 {
    lambda
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .map(|(_, &l)| l - lambda[i])
        .product()
}

/// Gradient of the top power sum (`f_j`) with the induced eigenvalue
/// gradients `λ_ij` (row `i`, column `j`).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientData {
    pub f_grad: Vec<f64>,
    pub lambda_grad: DMatrix<f64>,
}

impl GradientData {
    /// Max over `k`, `j` of `|Σ_i λ_i^{k-1} λ_ij - rhs_kj|` relative to the
    /// summed magnitudes, where `rhs` is zero except `f_j/n` in row `n`.
    pub fn system_residual(&self, lambda: &[f64]) -> f64 {
        let n = lambda.len();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let (mut sum, mut mag) = (0.0, 0.0);
                for (i, &l) in lambda.iter().enumerate() {
                    let term = l.powi(k as i32) * self.lambda_grad[(i, j)];
                    sum += term;
                    mag += term.abs();
                }
                let rhs = if k == n - 1 {
                    self.f_grad[j] / n as f64
                } else {
                    0.0
                };
                let scale = mag.max(rhs.abs()).max(f64::MIN_POSITIVE);
                worst = worst.max((sum - rhs).abs() / scale);
            }
        }
        worst
    }
}

fn check_grad(lambda: &[f64], f_grad: &[f64]) -> Result<()> {
    if lambda.len() != f_grad.len() {
        return Err(Error::InvalidInput(format!(
            "{} eigenvalues but {} gradient components",
            lambda.len(),
            f_grad.len()
        )));
    }
    if lambda.is_empty() {
        return Err(Error::InvalidInput("empty spectrum".into()));
    }
    Ok(())
}

/// `λ_ij = (-1)^{n+1} (f_j/n) / ∏_{k≠i} (λ_k - λ_i)`.
pub fn lambda_gradient_closed_form(lambda: &[f64], f_grad: &[f64]) -> Result<GradientData> {
    check_grad(lambda, f_grad)?;
    check_distinct(lambda)?;
    let n = lambda.len();
    let s = sign_pow(n + 1) / n as f64;
    let inv: Vec<f64> = (0..n).map(|i| 1.0 / gap_product(lambda, i)).collect();
    let lambda_grad = DMatrix::from_fn(n, n, |i, j| s * f_grad[j] * inv[i]);
    Ok(GradientData {
        f_grad: f_grad.to_vec(),
        lambda_grad,
    })
}

const REFINEMENT_STEPS: usize = 2;

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `t_i^k` for `k < n` as unevaluated sums `hi + lo`.
struct DoubleDoublePowers {
    hi: DMatrix<f64>,
    lo: DMatrix<f64>,
}

impl DoubleDoublePowers {
    fn new(t: &[f64]) -> Self {
        let n = t.len();
        let mut hi = DMatrix::zeros(n, n);
        let mut lo = DMatrix::zeros(n, n);
        for (i, &ti) in t.iter().enumerate() {
            let (mut h, mut l) = (1.0, 0.0);
            for k in 0..n {
                hi[(k, i)] = h;
                lo[(k, i)] = l;
                let (p, e) = two_prod(h, ti);
                let (s, e2) = two_sum(p, e + l * ti);
                h = s;
                l = e2;
            }
        }
        Self { hi, lo }
    }

    /// `rhs - D x`, accumulated with error-free transformations.
    fn residual(&self, x: &DMatrix<f64>, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        let n = x.nrows();
        DMatrix::from_fn(n, x.ncols(), |k, j| {
            let (mut s, mut c) = (rhs[(k, j)], 0.0);
            for i in 0..n {
                let (p, e) = two_prod(-self.hi[(k, i)], x[(i, j)]);
                let (s2, e2) = two_sum(s, p);
                s = s2;
                c += e2 + e - self.lo[(k, i)] * x[(i, j)];
            }
            s + c
        })
    }
}

/// Solves the Vandermonde system `D x = (0, ..., 0, f_j/n)` for every
/// column by LU with partial pivoting, in the monomial basis centred and
/// scaled to the spread of the eigenvalues, followed by iterative
/// refinement against a residual computed in double-double arithmetic.
pub fn lambda_gradient_linear_solve(
    lambda: &[f64],
    f_grad: &[f64],
    tol: f64,
) -> Result<GradientData> {
    check_grad(lambda, f_grad)?;
    let n = lambda.len();
    let gap = min_gap(lambda);
    if n > 1 && gap < tol {
        return Err(Error::SingularSystem { gap });
    }
    // Rows in the centred, scaled monomials t = (λ - mid)/half are a
    // triangular recombination of the original rows; with a right-hand side
    // supported on the last row only the last entry picks up half^{-(n-1)}.
    let (lo, hi) = lambda
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| (lo.min(l), hi.max(l)));
    let mid = 0.5 * (lo + hi);
    let half = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };
    let t: Vec<f64> = lambda.iter().map(|l| (l - mid) / half).collect();
    let d = DMatrix::from_fn(n, n, |k, i| t[i].powi(k as i32));
    let lu = d.lu();
    let mut rhs = DMatrix::zeros(n, n);
    let last_row = half.powi(-(n as i32 - 1)) / n as f64;
    for j in 0..n {
        rhs[(n - 1, j)] = f_grad[j] * last_row;
    }
    let mut lambda_grad = lu.solve(&rhs).ok_or(Error::SingularSystem { gap })?;
    let powers = DoubleDoublePowers::new(&t);
    for _ in 0..REFINEMENT_STEPS {
        let residual = powers.residual(&lambda_grad, &rhs);
        let correction = lu.solve(&residual).ok_or(Error::SingularSystem { gap })?;
        lambda_grad += correction;
    }
    Ok(GradientData {
        f_grad: f_grad.to_vec(),
        lambda_grad,
    })
}

/// `L(r) = Σ_{p≠q; p,q≠r} 1 / [(λ_r-λ_p)(λ_r-λ_q) ∏_{k≠p}(λ_k-λ_p) ∏_{l≠q}(λ_l-λ_q)]`.
pub fn l_value(lambda: &[f64], r: usize) -> Result<f64> {
    let n = lambda.len();
    if n < 3 {
        return Err(Error::InvalidInput("L(r) needs n >= 3".into()));
    }
    if r >= n {
        return Err(Error::InvalidInput(format!("index {r} out of range")));
    }
    check_distinct(lambda)?;
    let w: Vec<f64> = (0..n)
        .map(|p| {
            if p == r {
                0.0
            } else {
                1.0 / ((lambda[r] - lambda[p]) * gap_product(lambda, p))
            }
        })
        .collect();
    let mut acc = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q && p != r && q != r {
                acc += w[p] * w[q];
            }
        }
    }
    Ok(acc)
}

/// `u_ij = 1 / [(λ_i-λ_j)^2 ∏_{k≠i,j} (λ_k-λ_j)]`, no distinctness check.
fn u_ij_raw(lambda: &[f64], i: usize, j: usize) -> f64 {
    let prod: f64 = lambda
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i && k != j)
        .map(|(_, &l)| l - lambda[j])
        .product();
    let d = lambda[i] - lambda[j];
    1.0 / (d * d * prod)
}

pub fn u_ij(lambda: &[f64], i: usize, j: usize) -> Result<f64> {
    let n = lambda.len();
    if i >= n || j >= n || i == j {
        return Err(Error::InvalidInput(format!("bad index pair ({i}, {j})")));
    }
    check_distinct(lambda)?;
    Ok(u_ij_raw(lambda, i, j))
}

fn u_prefactor(n: usize) -> f64 {
    -2.0 * factorial(n.saturating_sub(2)) / n as f64
}

fn u_i_raw(lambda: &[f64], i: usize) -> f64 {
    let sum: f64 = (0..lambda.len())
        .filter(|&j| j != i)
        .map(|j| u_ij_raw(lambda, i, j))
        .sum();
    u_prefactor(lambda.len()) * sum
}

/// `u_i = -(2(n-2)!/n) Σ_{j≠i} u_ij`.
pub fn u_i(lambda: &[f64], i: usize) -> Result<f64> {
    let n = lambda.len();
    if n < 2 || i >= n {
        return Err(Error::InvalidInput(format!("bad index {i} for n = {n}")));
    }
    check_distinct(lambda)?;
    Ok(u_i_raw(lambda, i))
}

/// All `u_i`.
pub fn u_all(lambda: &[f64]) -> Result<Vec<f64>> {
    if lambda.len() < 2 {
        return Err(Error::InvalidInput("u_i needs n >= 2".into()));
    }
    check_distinct(lambda)?;
    Ok((0..lambda.len()).map(|i| u_i_raw(lambda, i)).collect())
}

/// `(n-2)! R_M + ((n-3)!/n^2) Σ_r (-L(r)) f_r^2`.
pub fn dpsi_density(lambda: &[f64], scalar_curvature: f64, f_grad: &[f64]) -> Result<f64> {
    check_grad(lambda, f_grad)?;
    let n = lambda.len();
    if n < 3 {
        return Err(Error::InvalidInput("dpsi density needs n >= 3".into()));
    }
    check_distinct(lambda)?;
    let mut acc = 0.0;
    for (r, fr) in f_grad.iter().enumerate() {
        acc += -l_value(lambda, r)? * fr * fr;
    }
    Ok(factorial(n - 2) * scalar_curvature + factorial(n - 3) / (n * n) as f64 * acc)
}

/// `Σ_i u_i f_i^2`.
pub fn dfpsi_density(lambda: &[f64], f_grad: &[f64]) -> Result<f64> {
    check_grad(lambda, f_grad)?;
    let u = u_all(lambda)?;
    Ok(u.iter().zip(f_grad).map(|(u, f)| u * f * f).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientComparison {
    pub max_relative_discrepancy: f64,
    pub max_residual_closed: f64,
    pub max_residual_solve: f64,
}

/// Compares the closed form with the direct solve on one spectrum.
pub fn compare_gradients(lambda: &[f64], f_grad: &[f64], tol: f64) -> Result<GradientComparison> {
    let closed = lambda_gradient_closed_form(lambda, f_grad)?;
    let solved = lambda_gradient_linear_solve(lambda, f_grad, tol)?;
    let n = lambda.len();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let col_c = closed.lambda_grad.column(j);
        let col_s = solved.lambda_grad.column(j);
        let scale = col_c.amax();
        if scale == 0.0 {
            worst = worst.max(col_s.amax());
            continue;
        }
        let diff: DVector<f64> = col_c - col_s;
        worst = worst.max(diff.amax() / scale);
    }
    Ok(GradientComparison {
        max_relative_discrepancy: worst,
        max_residual_closed: closed.system_residual(lambda),
        max_residual_solve: solved.system_residual(lambda),
    })
}
