//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `<x, y> = sum_j x_j conj(y_j)`, linear in the first argument.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Thin SVD with singular values sorted in decreasing order.
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

pub fn svd(a: &CMat) -> Svd {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return Svd {
            u: CMat::zeros(m, 0),
            s: Vec::new(),
            v: CMat::zeros(n, 0),
        };
    }
    let dec = a.clone().svd(true, true);
    let u = dec.u.expect("u requested");
    let v = dec.v_t.expect("v_t requested").adjoint();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| dec.singular_values[j].total_cmp(&dec.singular_values[i]));
    let s = order.iter().map(|&i| dec.singular_values[i]).collect();
    let u = CMat::from_fn(m, k, |r, c| u[(r, order[c])]);
    let v = CMat::from_fn(n, k, |r, c| v[(r, order[c])]);
    Svd { u, s, v }
}

pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn spectral_norm(a: &CMat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn frobenius_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis of `z^⊥` as the columns of an `m × (m-1)` matrix,
/// taken from the Householder reflector that maps `z` onto the first axis.
pub fn orthogonal_complement(z: &[Complex64]) -> CMat {
    let m = z.len();
    let nz = norm(z);
    let mut w: Vec<Complex64> = z.iter().map(|c| c / nz).collect();
    let phase = if w[0].norm() > 0.0 {
        w[0] / w[0].norm()
    } else {
        ONE
    };
    // w = z/|z| + phase e_0; H = I - 2 w w^* / |w|^2 satisfies H z ∝ e_0.
    w[0] += phase;
    let wn2: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    CMat::from_fn(m, m - 1, |r, c| {
        let col = c + 1;
        let delta = if r == col { ONE } else { ZERO };
        delta - w[r] * w[col].conj() * (2.0 / wn2)
    })
}

/// Solve `a x = b` with full pivoting. Returns `None` when the ratio of the
/// smallest to the largest pivot is below `rel_tol`.
pub fn solve(a: &CMat, b: &CVec, rel_tol: f64) -> Option<CVec> {
    let n = a.nrows();
    if n == 0 {
        return Some(CVec::zeros(0));
    }
    let lu = a.clone().full_piv_lu();
    let u = lu.u();
    let mut pmax = 0.0f64;
    let mut pmin = f64::INFINITY;
    for i in 0..n {
        let p = u[(i, i)].norm();
        pmax = pmax.max(p);
        pmin = pmin.min(p);
    }
    if !(pmax > 0.0) || pmin <= rel_tol * pmax {
        return None;
    }
    lu.solve(b)
}

/// Complex Gaussian matrix with `E|a_ij|^2 = 1`.
pub fn gaussian_matrix<R: rand::Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> CMat {
    CMat::from_fn(m, n, |_, _| crate::rng::complex_gaussian(rng))
}

/// Haar-distributed unitary matrix (QR of a Gaussian matrix with phase fix).
pub fn random_unitary<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = gaussian_matrix(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}
