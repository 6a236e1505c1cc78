//! Monomial bases of homogeneous forms and dense form arithmetic.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::linalg::{ONE, ZERO};

/// Exponent vector `(α_0, …, α_n)` of a monomial in `n + 1` variables.
pub type MultiIndex = Vec<u32>;

/// All monomials of a fixed degree in a fixed number of variables, in
/// graded-lexicographic order (`x_0` largest), with Bombieri–Weyl weights
/// `α_0!⋯α_n!/s!`.
#[derive(Debug)]
pub struct MonomialBasis {
    pub nvars: usize,
    pub degree: u32,
    pub exps: Vec<MultiIndex>,
    pub weights: Vec<f64>,
    index: HashMap<MultiIndex, usize>,
}

impl MonomialBasis {
    fn build(nvars: usize, degree: u32) -> Self {
        let mut exps = Vec::new();
        if nvars > 0 {
            let mut cur = vec![0u32; nvars];
            fill(&mut exps, &mut cur, 0, degree);
        }
        let weights = exps.iter().map(|a| bw_weight(a, degree)).collect();
        let index = exps.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        MonomialBasis {
            nvars,
            degree,
            exps,
            weights,
            index,
        }
    }

    /// Shared, cached basis for `(nvars, degree)`.
    pub fn get(nvars: usize, degree: u32) -> Arc<MonomialBasis> {
        type Cache = Mutex<HashMap<(usize, u32), Arc<MonomialBasis>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry((nvars, degree))
            .or_insert_with(|| Arc::new(MonomialBasis::build(nvars, degree)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        self.index.get(alpha).copied()
    }
}

/// `α_0!⋯α_n!/s!`, accumulated as a running product of ratios.
fn bw_weight(alpha: &[u32], degree: u32) -> f64 {
    let mut w = 1.0;
    let mut k = degree;
    for &ai in alpha {
        for j in 1..=ai {
            w *= j as f64 / k as f64;
            k -= 1;
        }
    }
    w
}

// Descending lexicographic enumeration: x0^s first.
fn fill(out: &mut Vec<MultiIndex>, cur: &mut MultiIndex, pos: usize, remaining: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        fill(out, cur, pos + 1, remaining - a);
    }
    cur[pos] = 0;
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// A single homogeneous form stored densely over its monomial basis.
#[derive(Debug, Clone)]
pub struct Form {
    pub basis: Arc<MonomialBasis>,
    pub coeffs: Vec<Complex64>,
}

impl Form {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        let basis = MonomialBasis::get(nvars, degree);
        let coeffs = vec![ZERO; basis.len()];
        Form { basis, coeffs }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut f = Form::zero(nvars, 0);
        f.coeffs[0] = c;
        f
    }

    /// The linear form `sum_j l_j x_j`.
    pub fn linear(l: &[Complex64]) -> Self {
        let nvars = l.len();
        let mut f = Form::zero(nvars, 1);
        // degree-1 basis is x_0, x_1, …, x_n in that order
        f.coeffs.copy_from_slice(l);
        f
    }

    /// The single monomial `c · x^α`.
    pub fn monomial(alpha: &[u32], c: Complex64) -> Self {
        let degree = alpha.iter().sum();
        let mut f = Form::zero(alpha.len(), degree);
        let i = f.basis.index_of(alpha).expect("monomial in basis");
        f.coeffs[i] = c;
        f
    }

    pub fn degree(&self) -> u32 {
        self.basis.degree
    }

    pub fn nvars(&self) -> usize {
        self.basis.nvars
    }

    pub fn mul(&self, other: &Form) -> Form {
        assert_eq!(self.nvars(), other.nvars());
        let mut out = Form::zero(self.nvars(), self.degree() + other.degree());
        let mut alpha = vec![0u32; self.nvars()];
        for (a, &ca) in self.basis.exps.iter().zip(&self.coeffs) {
            if ca == ZERO {
                continue;
            }
            for (b, &cb) in other.basis.exps.iter().zip(&other.coeffs) {
                if cb == ZERO {
                    continue;
                }
                for j in 0..alpha.len() {
                    alpha[j] = a[j] + b[j];
                }
                let i = out.basis.index_of(&alpha).expect("product monomial");
                out.coeffs[i] += ca * cb;
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Form {
        let mut out = Form::constant(self.nvars(), ONE);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn scale(&mut self, c: Complex64) {
        self.coeffs.iter_mut().for_each(|a| *a *= c);
    }

    pub fn add_scaled(&mut self, c: Complex64, other: &Form) {
        assert_eq!(self.basis.degree, other.basis.degree);
        assert_eq!(self.basis.nvars, other.basis.nvars);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
    }

    /// Bombieri–Weyl Hermitian product, linear in `self`.
    pub fn bw_inner(&self, other: &Form) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .zip(&self.basis.weights)
            .map(|((a, b), w)| a * b.conj() * *w)
            .sum()
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.basis
            .exps
            .iter()
            .zip(&self.coeffs)
            .map(|(a, c)| a.iter().zip(x).fold(*c, |acc, (&e, xi)| acc * xi.powu(e)))
            .sum()
    }
}
