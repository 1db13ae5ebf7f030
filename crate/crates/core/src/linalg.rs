//! Small dense-matrix helpers shared by the solvers and the checks.

use crate::{Col, Mat};

/// `(M + Mᵀ)/2` — wipes the asymmetry drift that accumulates over Riccati
/// sweeps.
pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Largest absolute entry. This is the norm used by every convergence and
/// residual gate in the crate.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    max_abs(&(a - b))
}

pub fn max_abs_col(v: &Col) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn is_finite_mat(m: &Mat) -> bool {
    m.iter().all(|x| x.is_finite())
}

/// Spectral radius via full eigendecomposition; state dimensions in this
/// domain are small, so no power iteration.
pub fn spectral_radius(m: &Mat) -> f64 {
    m.clone().complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0_f64, f64::max)
}

/// Smallest eigenvalue of (the symmetric part of) `m`.
pub fn min_symmetric_eigenvalue(m: &Mat) -> f64 {
    symmetrize(m).symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// 2-norm condition number from singular values; `+inf` when numerically
/// singular (or empty).
pub fn condition_number(m: &Mat) -> f64 {
    let sv = m.clone().singular_values();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    for s in sv.iter() {
        lo = lo.min(*s);
        hi = hi.max(*s);
    }
    if lo <= 0.0 || !lo.is_finite() || !hi.is_finite() {
        f64::INFINITY
    } else {
        hi / lo
    }
}

///// Numerical rank: number of singular values above `factor * EPS * sigma_max`,
/// together with the singular values actually used for the decision.
pub fn rank_via_svd(m: &Mat, factor: usize) -> (usize, Vec<f64>) {
    let sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    let sigma_max = sv.iter().copied().fold(0.0_f64, f64::max);
    let thresh = factor as f64 * crate::tol::EPS_MACHINE * sigma_max;
    let rank = sv.iter().filter(|s| **s > thresh).count();
    (rank, sv)
}

/// Scalar quadratic form `vᵀ M v`.
pub fn quad_form(m: &Mat, v: &Col) -> f64 {
    (v.transpose() * m * v)[(0, 0)]
}

/// Matrix ∞-norm (largest absolute row sum).
pub fn inf_norm(m: &Mat) -> f64 {
    (0..m.nrows()).map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0_f64, f64::max)
}
