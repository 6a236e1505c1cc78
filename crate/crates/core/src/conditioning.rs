//! Condition numbers of polynomial systems at projective points.

use num_complex::Complex64;

use crate::linalg::{self, CMat, ZERO};
use crate::polyspace::{binomial, PolySystem, ProjectivePoint};

/// Restricted singular values at or below this fraction of the largest are
/// treated as zero, making `μ` infinite.
pub const RANK_TOL: f64 = 1e-14;
/// Truncation threshold for the pseudoinverse.
pub const PINV_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub mu: f64,
    /// Smallest singular value of the scaled restricted derivative.
    pub sigma_min: f64,
    pub scaled: bool,
}

/// `Diag(1/(‖z‖^{d_i−1} √d_i)) · Dh(z) · B`, where the columns of `B` span `z^⊥`.
pub fn scaled_restricted(jac: &CMat, basis: &CMat, degrees: &[u32], znorm: f64) -> CMat {
    let mut m = jac * basis;
    for (i, &d) in degrees.iter().enumerate() {
        let s = 1.0 / (znorm.powi(d as i32 - 1) * (d as f64).sqrt());
        m.row_mut(i).iter_mut().for_each(|c| *c *= s);
    }
    m
}

/// `μ = ‖h‖ / σ_min` of a scaled restricted derivative, with the rank test applied.
pub fn mu_from_scaled(hnorm: f64, m: &CMat) -> ConditionReport {
    let s = linalg::singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    let smin = s.last().copied().unwrap_or(0.0);
    let mu = if !(smax > 0.0) || smin <= RANK_TOL * smax {
        f64::INFINITY
    } else {
        hnorm / smin
    };
    ConditionReport {
        mu,
        sigma_min: smin,
        scaled: true,
    }
}

/// Full report for `μ(h, z)` at an arbitrary (not necessarily unit) representative.
pub fn condition_at(h: &PolySystem, z: &[Complex64]) -> ConditionReport {
    let jac = h.jacobian(z);
    let basis = linalg::orthogonal_complement(z);
    let m = scaled_restricted(&jac, &basis, h.degrees().as_slice(), linalg::norm(z));
    mu_from_scaled(h.bw_norm(), &m)
}

/// `μ(h, z) = ‖h‖ · ‖(Dh(z)|_{z^⊥})^{-1} Diag(‖z‖^{d_i−1} √d_i)‖`.
pub fn mu(h: &PolySystem, z: &ProjectivePoint) -> f64 {
    condition_at(h, z.rep()).mu
}

/// Closed form of `μ` at a zero of a univariate polynomial
/// `f(z) = Σ_k a_k z^k` (coefficients in ascending order, degree = `len − 1`).
pub fn mu_univariate(coeffs: &[Complex64], z: Complex64) -> f64 {
    let d = coeffs.len() - 1;
    let hnorm = coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm_sqr() / binomial(d as u64, k as u64) as f64)
        .sum::<f64>()
        .sqrt();
    let fp: Complex64 = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| a * k as f64 * z.powu(k as u32 - 1))
        .sum();
    if fp == ZERO {
        return f64::INFINITY;
    }
    (d as f64).sqrt() * (1.0 + z.norm_sqr()).powf((d as f64 - 2.0) / 2.0) * hnorm / fp.norm()
}

/// Frobenius variant `‖h‖ · ‖Dh(z)^† Diag(‖z‖^{d_i−1} √d_i)‖_F`.
pub fn mu_frobenius(h: &PolySystem, z: &ProjectivePoint) -> f64 {
    let x = z.rep();
    let znorm = linalg::norm(x);
    let mut p = moore_penrose(&h.jacobian(x));
    for (i, &d) in h.degrees().as_slice().iter().enumerate() {
        let s = znorm.powi(d as i32 - 1) * (d as f64).sqrt();
        p.column_mut(i).iter_mut().for_each(|c| *c *= s);
    }
    h.bw_norm() * linalg::frobenius_norm(&p)
}

/// SVD pseudoinverse `V D^† U^*`, singular values below `1e-12 σ_max` dropped.
pub fn moore_penrose(a: &CMat) -> CMat {
    let (m, k) = a.shape();
    let dec = linalg::svd(a);
    let smax = dec.s.first().copied().unwrap_or(0.0);
    let mut out = CMat::zeros(k, m);
    for (j, &s) in dec.s.iter().enumerate() {
        if s <= PINV_TOL * smax || s == 0.0 {
            continue;
        }
        let vj = dec.v.column(j);
        let uj = dec.u.column(j);
        out += (vj * uj.adjoint()) * Complex64::new(1.0 / s, 0.0);
    }
    out
}

/// Spectral distance from a full-rank `m × n` matrix (`m ≤ n`) to the set of
/// rank-deficient matrices, i.e. `σ_m(A)`; numerically rank-deficient input gives 0.
pub fn distance_to_rank_deficient(a: &CMat) -> f64 {
    let s = linalg::singular_values(a);
    match (s.first(), s.last()) {
        (Some(&smax), Some(&smin)) if smax > 0.0 && smin > RANK_TOL * smax => smin,
        _ => 0.0,
    }
}
