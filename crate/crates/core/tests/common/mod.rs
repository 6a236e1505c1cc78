//! Independent oracles shared by the integration suites. Nothing here calls
//! into the library's own root finders or singular value code.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Characteristic polynomial `det(λI − A)` by Faddeev–LeVerrier, ascending
/// coefficients with leading coefficient 1.
pub fn char_poly(a: &CMat) -> Vec<Complex64> {
    let n = a.nrows();
    let mut coeffs = vec![c(0.0, 0.0); n + 1];
    coeffs[n] = c(1.0, 0.0);
    let mut m = CMat::zeros(n, n);
    for k in 1..=n {
        m = a * &m + CMat::identity(n, n) * coeffs[n - k + 1];
        let am = a * &m;
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = c(0.0, 0.0);
    let mut dp = c(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All roots of a polynomial (ascending coefficients) by Aberth–Ehrlich
/// simultaneous iteration.
pub fn aberth_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        coeffs.pop();
    }
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let monic: Vec<Complex64> = coeffs.iter().map(|&a| a / lead).collect();
    let radius = 1.0 + monic[..d].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64))
        .collect();
    for _ in 0..500 {
        let mut biggest = 0.0f64;
        for i in 0..d {
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * repulsion);
            z[i] -= w;
            biggest = biggest.max(w.norm() / z[i].norm().max(1.0));
        }
        if biggest < 1e-16 {
            break;
        }
    }
    z
}

/// Largest distance in the best greedy pairing of two equally sized root sets.
pub fn match_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut free: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for &x in a {
        let (k, d) = free
            .iter()
            .enumerate()
            .map(|(k, &y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("nonempty");
        worst = worst.max(d);
        free.swap_remove(k);
    }
    worst
}

/// Distance from `A` (`m ≤ n`) to the nearest matrix of rank `< m`, found by
/// removing the weakest left direction: the bottom eigenvector `u` of `AA*`
/// gives `B = A − u u* A`, which is rank deficient with `‖A − B‖₂ = ‖u* A‖`.
/// Returns `(‖A − B‖₂, ‖u* B‖ / ‖A‖)`; the second is zero up to rounding.
pub fn truncation_distance(a: &CMat) -> (f64, f64) {
    let gram = a * a.adjoint();
    let eig = SymmetricEigen::new(gram);
    let (k, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|p, q| p.1.total_cmp(q.1))
        .expect("nonempty");
    let u = eig.eigenvectors.column(k).into_owned();
    let b = a - &u * (u.adjoint() * a);
    let diff = a - &b;
    let dist = (diff.adjoint() * &diff).trace().re.sqrt();
    let residual = (u.adjoint() * &b).norm();
    (dist, residual / a.norm())
}

/// Two-sided Kolmogorov–Smirnov statistic of `sample` against `cdf`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((((i + 1) as f64) / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the KS statistic `d` at sample size `n`.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lam = (sn + 0.12 + 0.11 / sn) * d;
    if lam < 0.2 {
        return 1.0;
    }
    let mut p = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let sign = if j as i64 % 2 == 1 { 1.0 } else { -1.0 };
        p += 2.0 * sign * (-2.0 * j * j * lam * lam).exp();
    }
    p.clamp(0.0, 1.0)
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = 0.5 * (i + j) as f64;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    cov / (vx * vy).sqrt()
}
