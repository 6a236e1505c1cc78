//! Dense homogeneous polynomial systems with the Bombieri–Weyl structure.
//!
//! A system `h = (h_1, …, h_n)` lives in `H_(d) = H_{d_1} × ⋯ × H_{d_n}`,
//! the space of `n` forms in the `n + 1` variables `x_0, …, x_n`. Coefficients
//! are stored densely, one [`Form`] per equation, in graded-lexicographic
//! order. Zeros are points of `P(C^{n+1})`, represented by unit vectors
//! ([`ProjectivePoint`]).

mod basis;
mod json;

pub use basis::{binomial, Form, MonomialBasis, MultiIndex};
pub use json::{PointJson, SystemJson, TermJson};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ZERO};
use crate::rng::{self, Domain};

/// Tolerance for projective equality `|1 − |<x, y>|| ≤ PROJ_EQ_TOL`.
pub const PROJ_EQ_TOL: f64 = 1e-10;
/// Relative size of `|x_0|` below which a point is treated as lying at infinity.
pub const CHART_THRESHOLD: f64 = 1e-8;

/// The degree list `(d) = (d_1, …, d_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeList(Vec<u32>);

impl DegreeList {
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidInput("degree list must be nonempty".into()));
        }
        if degrees.contains(&0) {
            return Err(Error::InvalidInput("every degree must be at least 1".into()));
        }
        Ok(DegreeList(degrees))
    }

    /// `(d, d, …, d)` with `n` entries.
    pub fn uniform(n: usize, d: u32) -> Result<Self> {
        DegreeList::new(vec![d; n])
    }

    /// Number of equations (and of affine unknowns).
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// `d = max d_i`.
    pub fn max_degree(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(1)
    }

    /// Bézout number `𝒟 = ∏ d_i`.
    pub fn bezout(&self) -> u128 {
        self.0.iter().map(|&d| d as u128).product()
    }

    /// `dim H_(d) = Σ_i C(d_i + n, n) = N + 1`.
    pub fn dim(&self) -> usize {
        let n = self.n() as u64;
        self.0.iter().map(|&d| binomial(d as u64 + n, n) as usize).sum()
    }

    /// Complex dimension `N` of `P(H_(d))`.
    pub fn projective_dim(&self) -> usize {
        self.dim() - 1
    }
}

/// A homogeneous system of `n` forms in `n + 1` variables.
#[derive(Debug, Clone)]
pub struct PolySystem {
    degrees: DegreeList,
    polys: Vec<Form>,
}

impl PolySystem {
    pub fn zeros(degrees: &DegreeList) -> Self {
        let nvars = degrees.n() + 1;
        let polys = degrees.as_slice().iter().map(|&d| Form::zero(nvars, d)).collect();
        PolySystem {
            degrees: degrees.clone(),
            polys,
        }
    }

    /// Build from explicit forms; each form must have `n + 1` variables and
    /// the matching degree.
    pub fn from_forms(polys: Vec<Form>) -> Result<Self> {
        let degrees = DegreeList::new(polys.iter().map(Form::degree).collect())?;
        let nvars = degrees.n() + 1;
        if let Some(f) = polys.iter().find(|f| f.nvars() != nvars) {
            return Err(Error::Shape(format!(
                "form has {} variables, system needs {}",
                f.nvars(),
                nvars
            )));
        }
        Ok(PolySystem { degrees, polys })
    }

    /// Build from sparse terms `(α, c)` per equation. Repeated multi-indices add up.
    pub fn from_terms(degrees: &DegreeList, terms: &[Vec<(MultiIndex, Complex64)>]) -> Result<Self> {
        if terms.len() != degrees.n() {
            return Err(Error::Shape(format!(
                "{} polynomials for {} degrees",
                terms.len(),
                degrees.n()
            )));
        }
        let mut sys = PolySystem::zeros(degrees);
        let nvars = degrees.n() + 1;
        for (i, poly) in terms.iter().enumerate() {
            let d = degrees.as_slice()[i];
            for (alpha, c) in poly {
                if alpha.len() != nvars {
                    return Err(Error::Shape(format!(
                        "multi-index of length {} in a system with {} variables",
                        alpha.len(),
                        nvars
                    )));
                }
                let s: u32 = alpha.iter().sum();
                if s != d {
                    return Err(Error::DegreeViolation {
                        poly: i,
                        declared: d,
                        found: s,
                    });
                }
                let idx = sys.polys[i].basis.index_of(alpha).expect("valid multi-index");
                sys.polys[i].coeffs[idx] += c;
            }
        }
        Ok(sys)
    }

    pub fn degrees(&self) -> &DegreeList {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.n()
    }

    pub fn nvars(&self) -> usize {
        self.n() + 1
    }

    pub fn polys(&self) -> &[Form] {
        &self.polys
    }

    pub fn polys_mut(&mut self) -> &mut [Form] {
        &mut self.polys
    }

    /// `h(x)`.
    pub fn evaluate(&self, x: &[Complex64]) -> Vec<Complex64> {
        let pw = PowerTable::new(x, self.degrees.max_degree());
        self.polys
            .iter()
            .map(|f| {
                f.basis
                    .exps
                    .iter()
                    .zip(&f.coeffs)
                    .map(|(a, &c)| c * pw.monomial(a))
                    .sum()
            })
            .collect()
    }

    /// `Dh(x)`, an `n × (n+1)` matrix with entry `(i, j) = ∂h_i/∂x_j (x)`.
    pub fn jacobian(&self, x: &[Complex64]) -> CMat {
        self.eval_with_jacobian(x).1
    }

    /// `h(x)` and `Dh(x)` in one pass over the coefficients.
    pub fn eval_with_jacobian(&self, x: &[Complex64]) -> (Vec<Complex64>, CMat) {
        let nv = self.nvars();
        let pw = PowerTable::new(x, self.degrees.max_degree());
        let mut val = vec![ZERO; self.n()];
        let mut jac = CMat::zeros(self.n(), nv);
        for (i, f) in self.polys.iter().enumerate() {
            for (a, &c) in f.basis.exps.iter().zip(&f.coeffs) {
                if c == ZERO {
                    continue;
                }
                val[i] += c * pw.monomial(a);
                for j in 0..nv {
                    if a[j] == 0 {
                        continue;
                    }
                    let mut t = c * a[j] as f64 * pw.get(j, a[j] - 1);
                    for (l, &al) in a.iter().enumerate() {
                        if l != j {
                            t *= pw.get(l, al);
                        }
                    }
                    jac[(i, j)] += t;
                }
            }
        }
        (val, jac)
    }

    /// Bombieri–Weyl product `<self, other> = Σ_i <h_i, g_i>`.
    pub fn bw_inner(&self, other: &PolySystem) -> Result<Complex64> {
        if self.degrees != other.degrees {
            return Err(Error::Shape("degree lists differ".into()));
        }
        Ok(self.polys.iter().zip(&other.polys).map(|(a, b)| a.bw_inner(b)).sum())
    }

    pub fn bw_norm(&self) -> f64 {
        self.polys
            .iter()
            .map(|f| f.bw_inner(f).re)
            .sum::<f64>()
            .max(0.0)
            .sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> PolySystem {
        let mut out = self.clone();
        out.polys.iter_mut().for_each(|f| f.scale(c));
        out
    }

    /// `self / ‖self‖`. Panics on the zero system.
    pub fn normalized(&self) -> PolySystem {
        let nrm = self.bw_norm();
        assert!(nrm > 0.0, "cannot normalize the zero system");
        self.scaled(Complex64::new(1.0 / nrm, 0.0))
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &PolySystem, b: Complex64) -> Result<PolySystem> {
        if self.degrees != other.degrees {
            return Err(Error::Shape("degree lists differ".into()));
        }
        let mut out = self.scaled(a);
        for (f, g) in out.polys.iter_mut().zip(&other.polys) {
            f.add_scaled(b, g);
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.polys.iter().all(|f| f.coeffs.iter().all(|c| *c == ZERO))
    }

    /// `h ∘ U`, i.e. the system `x ↦ h(U x)`.
    pub fn unitary_act(&self, u: &CMat) -> Result<PolySystem> {
        let nv = self.nvars();
        if u.shape() != (nv, nv) {
            return Err(Error::Shape(format!("expected {nv}×{nv} matrix, got {:?}", u.shape())));
        }
        let dev = (u.adjoint() * u - CMat::identity(nv, nv)).camax();
        if dev > 1e-12 {
            return Err(Error::NotUnitary(dev));
        }
        let dmax = self.degrees.max_degree();
        // powers[j][k] = ((U x)_j)^k
        let powers: Vec<Vec<Form>> = (0..nv)
            .map(|j| {
                let row: Vec<Complex64> = (0..nv).map(|k| u[(j, k)]).collect();
                let l = Form::linear(&row);
                let mut p = vec![Form::constant(nv, Complex64::new(1.0, 0.0))];
                for k in 1..=dmax as usize {
                    let next = p[k - 1].mul(&l);
                    p.push(next);
                }
                p
            })
            .collect();
        let mut polys = Vec::with_capacity(self.n());
        for f in &self.polys {
            let mut out = Form::zero(nv, f.degree());
            for (a, &c) in f.basis.exps.iter().zip(&f.coeffs) {
                if c == ZERO {
                    continue;
                }
                let mut term = Form::constant(nv, c);
                for (j, &aj) in a.iter().enumerate() {
                    if aj > 0 {
                        term = term.mul(&powers[j][aj as usize]);
                    }
                }
                out.add_scaled(Complex64::new(1.0, 0.0), &term);
            }
            polys.push(out);
        }
        Ok(PolySystem {
            degrees: self.degrees.clone(),
            polys,
        })
    }

    /// Standard Gaussian system for the Bombieri–Weyl structure: the
    /// coefficient of `x^α` in equation `i` is `sqrt(d_i!/α!) · ξ` with `ξ`
    /// standard complex Gaussian, so `E‖h‖^2 = N + 1`.
    pub fn sample_gaussian<R: Rng + ?Sized>(degrees: &DegreeList, rng: &mut R) -> PolySystem {
        let mut sys = PolySystem::zeros(degrees);
        for f in sys.polys.iter_mut() {
            let w = f.basis.weights.clone();
            for (c, wi) in f.coeffs.iter_mut().zip(w) {
                *c = rng::complex_gaussian(rng) / wi.sqrt();
            }
        }
        sys
    }

    /// Uniform sample from the unit sphere `𝕊` of `H_(d)`.
    pub fn sample_sphere<R: Rng + ?Sized>(degrees: &DegreeList, rng: &mut R) -> PolySystem {
        PolySystem::sample_gaussian(degrees, rng).normalized()
    }
}

/// `sample_gaussian` on the stream `(seed, System, 0)`.
pub fn sample_bw_gaussian(degrees: &DegreeList, seed: u64) -> PolySystem {
    let mut r = rng::stream(seed, Domain::System, 0);
    PolySystem::sample_gaussian(degrees, &mut r)
}

struct PowerTable {
    stride: usize,
    data: Vec<Complex64>,
}

impl PowerTable {
    fn new(x: &[Complex64], dmax: u32) -> Self {
        let stride = dmax as usize + 1;
        let mut data = Vec::with_capacity(stride * x.len());
        for &xi in x {
            let mut p = Complex64::new(1.0, 0.0);
            for _ in 0..stride {
                data.push(p);
                p *= xi;
            }
        }
        PowerTable { stride, data }
    }

    #[inline]
    fn get(&self, j: usize, k: u32) -> Complex64 {
        self.data[j * self.stride + k as usize]
    }

    #[inline]
    fn monomial(&self, a: &[u32]) -> Complex64 {
        a.iter()
            .enumerate()
            .fold(Complex64::new(1.0, 0.0), |acc, (j, &k)| acc * self.get(j, k))
    }
}

/// An affine system `f: C^n → C^n` as sparse terms over exponents of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSystem {
    pub n: usize,
    pub polys: Vec<Vec<(MultiIndex, Complex64)>>,
}

impl AffineSystem {
    pub fn evaluate(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.polys
            .iter()
            .map(|p| {
                p.iter()
                    .map(|(a, c)| a.iter().zip(z).fold(*c, |acc, (&e, zi)| acc * zi.powu(e)))
                    .sum()
            })
            .collect()
    }

    pub fn jacobian(&self, z: &[Complex64]) -> CMat {
        let mut j = CMat::zeros(self.polys.len(), self.n);
        for (i, p) in self.polys.iter().enumerate() {
            for (a, c) in p {
                for k in 0..self.n {
                    if a[k] == 0 {
                        continue;
                    }
                    let mut t = c * a[k] as f64;
                    for (l, (&e, zl)) in a.iter().zip(z).enumerate() {
                        let e = if l == k { e - 1 } else { e };
                        t *= zl.powu(e);
                    }
                    j[(i, k)] += t;
                }
            }
        }
        j
    }
}

/// Homogeneous counterpart of `f`: each monomial is padded with
/// `x_0^{d_i − |α|}`.
pub fn homogenize(f: &AffineSystem, degrees: &DegreeList) -> Result<PolySystem> {
    if f.polys.len() != degrees.n() || f.n != degrees.n() {
        return Err(Error::Shape(format!(
            "{} affine polynomials in {} unknowns for {} degrees",
            f.polys.len(),
            f.n,
            degrees.n()
        )));
    }
    let terms: Vec<Vec<(MultiIndex, Complex64)>> = f
        .polys
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let d = degrees.as_slice()[i];
            p.iter()
                .map(|(a, c)| {
                    if a.len() != f.n {
                        return Err(Error::Shape("affine multi-index length".into()));
                    }
                    let s: u32 = a.iter().sum();
                    if s > d {
                        return Err(Error::DegreeViolation {
                            poly: i,
                            declared: d,
                            found: s,
                        });
                    }
                    let mut alpha = Vec::with_capacity(f.n + 1);
                    alpha.push(d - s);
                    alpha.extend_from_slice(a);
                    Ok((alpha, *c))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    PolySystem::from_terms(degrees, &terms)
}

/// Set `x_0 = 1`: the inverse of [`homogenize`] (zero coefficients dropped).
pub fn dehomogenize(h: &PolySystem) -> AffineSystem {
    let polys = h
        .polys
        .iter()
        .map(|f| {
            f.basis
                .exps
                .iter()
                .zip(&f.coeffs)
                .filter(|(_, c)| **c != ZERO)
                .map(|(a, c)| (a[1..].to_vec(), *c))
                .collect()
        })
        .collect();
    AffineSystem { n: h.n(), polys }
}

/// A point of `P(C^{n+1})` held as a unit-norm representative.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    rep: Vec<Complex64>,
}

impl ProjectivePoint {
    /// Normalizes `v`; fails on the zero vector.
    pub fn new(v: Vec<Complex64>) -> Result<Self> {
        let nrm = linalg::norm(&v);
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(Error::InvalidInput("projective point needs a nonzero finite vector".into()));
        }
        Ok(ProjectivePoint {
            rep: v.into_iter().map(|c| c / nrm).collect(),
        })
    }

    /// Affine point `z ↦ (1, z)` normalized.
    pub fn from_affine(z: &[Complex64]) -> Self {
        let mut v = Vec::with_capacity(z.len() + 1);
        v.push(Complex64::new(1.0, 0.0));
        v.extend_from_slice(z);
        ProjectivePoint::new(v).expect("(1, z) is nonzero")
    }

    /// `e_0 = (1, 0, …, 0)` in `P(C^{n+1})`.
    pub fn e0(n: usize) -> Self {
        let mut v = vec![ZERO; n + 1];
        v[0] = Complex64::new(1.0, 0.0);
        ProjectivePoint { rep: v }
    }

    pub fn rep(&self) -> &[Complex64] {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    pub fn into_rep(self) -> Vec<Complex64> {
        self.rep
    }

    /// Same point, representative multiplied by `e^{iθ}`.
    pub fn rotated(&self, theta: f64) -> Self {
        let ph = Complex64::from_polar(1.0, theta);
        ProjectivePoint {
            rep: self.rep.iter().map(|c| c * ph).collect(),
        }
    }

    /// `|1 − |<x, y>|| ≤ 1e-10`.
    pub fn projectively_eq(&self, other: &ProjectivePoint) -> bool {
        (1.0 - linalg::inner(&self.rep, &other.rep).norm()).abs() <= PROJ_EQ_TOL
    }
}

/// Riemannian distance in `P(C^{n+1})`: the angle `arccos |<x, y>|`,
/// evaluated through `atan2` so that nearby points keep full precision.
pub fn proj_distance(x: &ProjectivePoint, y: &ProjectivePoint) -> f64 {
    let c = linalg::inner(&y.rep, &x.rep);
    let perp: f64 = y
        .rep
        .iter()
        .zip(&x.rep)
        .map(|(yi, xi)| (yi - c * xi).norm_sqr())
        .sum::<f64>()
        .sqrt();
    perp.atan2(c.norm())
}

/// `(ζ_1/ζ_0, …, ζ_n/ζ_0)`; fails when `|ζ_0|` is below the chart threshold.
pub fn affine_zero_of(zeta: &ProjectivePoint) -> Result<Vec<Complex64>> {
    let z0 = zeta.rep[0];
    if z0.norm() <= CHART_THRESHOLD {
        return Err(Error::ZeroAtInfinity(z0.norm()));
    }
    Ok(zeta.rep[1..].iter().map(|c| c / z0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::{prop_assert, proptest};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn x1sq_minus_x0sq() -> PolySystem {
        let deg = DegreeList::new(vec![2]).unwrap();
        PolySystem::from_terms(&deg, &[vec![(vec![0, 2], c(1.0, 0.0)), (vec![2, 0], c(-1.0, 0.0))]]).unwrap()
    }

    fn random_point<R: Rng>(rng: &mut R, m: usize) -> Vec<Complex64> {
        (0..m).map(|_| rng::complex_gaussian(rng)).collect()
    }

    #[test]
    fn degree_list_derived_quantities() {
        let d = DegreeList::new(vec![2, 3]).unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.max_degree(), 3);
        assert_eq!(d.bezout(), 6);
        // C(4,2) + C(5,2) = 6 + 10
        assert_eq!(d.dim(), 16);
        assert_eq!(d.projective_dim(), 15);
        assert!(DegreeList::new(vec![]).is_err());
        assert!(DegreeList::new(vec![1, 0]).is_err());
    }

    #[test]
    fn homogenize_examples() {
        let deg = DegreeList::new(vec![2]).unwrap();
        let f = AffineSystem {
            n: 1,
            polys: vec![vec![(vec![2], c(1.0, 0.0)), (vec![0], c(-1.0, 0.0))]],
        };
        let h = homogenize(&f, &deg).unwrap();
        let expect = x1sq_minus_x0sq();
        assert_eq!(h.polys()[0].coeffs, expect.polys()[0].coeffs);

        let deg1 = DegreeList::new(vec![1]).unwrap();
        let one = AffineSystem {
            n: 1,
            polys: vec![vec![(vec![0], c(1.0, 0.0))]],
        };
        let h = homogenize(&one, &deg1).unwrap();
        // x0
        assert_eq!(h.polys()[0].coeffs, vec![c(1.0, 0.0), c(0.0, 0.0)]);

        // z1 z2 + z1 with (d) = (2): two unknowns need two equations, so pair it with z2
        let deg22 = DegreeList::new(vec![2, 1]).unwrap();
        let f2 = AffineSystem {
            n: 2,
            polys: vec![
                vec![(vec![1, 1], c(1.0, 0.0)), (vec![1, 0], c(1.0, 0.0))],
                vec![(vec![0, 1], c(1.0, 0.0))],
            ],
        };
        let h2 = homogenize(&f2, &deg22).unwrap();
        let b = &h2.polys()[0].basis;
        let at = |a: &[u32]| h2.polys()[0].coeffs[b.index_of(a).unwrap()];
        assert_eq!(at(&[0, 1, 1]), c(1.0, 0.0));
        assert_eq!(at(&[1, 1, 0]), c(1.0, 0.0));
        assert_eq!(h2.polys()[0].coeffs.iter().filter(|z| **z != ZERO).count(), 2);
        assert_eq!(dehomogenize(&h2).polys[0].len(), 2);
    }

    #[test]
    fn homogenize_rejects_degree_violation() {
        let deg = DegreeList::new(vec![1]).unwrap();
        let f = AffineSystem {
            n: 1,
            polys: vec![vec![(vec![2], c(1.0, 0.0))]],
        };
        assert!(matches!(homogenize(&f, &deg), Err(Error::DegreeViolation { .. })));
    }

    #[test]
    fn dehomogenize_round_trip() {
        let mut r = stream(11, Domain::System, 0);
        let deg = DegreeList::new(vec![2, 3]).unwrap();
        let h = PolySystem::sample_gaussian(&deg, &mut r);
        let f = dehomogenize(&h);
        let h2 = homogenize(&f, &deg).unwrap();
        for (a, b) in h.polys().iter().zip(h2.polys()) {
            assert_eq!(a.coeffs, b.coeffs);
        }
    }

    #[test]
    fn affine_zero_examples() {
        let p = ProjectivePoint::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        let z = affine_zero_of(&p).unwrap();
        assert!((z[0] - c(2.0, 0.0)).norm() < 1e-14 && (z[1] - c(3.0, 0.0)).norm() < 1e-14);
        for theta in [0.3, 1.7, -2.2] {
            let e = Complex64::from_polar(1.0, theta);
            let p = ProjectivePoint::new(vec![e, e]).unwrap();
            assert!((affine_zero_of(&p).unwrap()[0] - c(1.0, 0.0)).norm() < 1e-14);
        }
        let inf = ProjectivePoint::new(vec![ZERO, c(1.0, 0.0)]).unwrap();
        assert!(matches!(affine_zero_of(&inf), Err(Error::ZeroAtInfinity(_))));
    }

    #[test]
    fn evaluate_examples() {
        let h = x1sq_minus_x0sq();
        assert!(h.evaluate(&[c(1.0, 0.0), c(1.0, 0.0)])[0].norm() < 1e-15);
        assert_eq!(h.evaluate(&[c(1.0, 0.0), c(0.0, 2.0)])[0], c(-5.0, 0.0));
        let mut r = stream(2, Domain::System, 0);
        let g = PolySystem::sample_gaussian(&DegreeList::new(vec![1, 2, 3]).unwrap(), &mut r);
        assert!(g.evaluate(&[ZERO; 4]).iter().all(|v| *v == ZERO));
    }

    #[test]
    fn jacobian_examples() {
        let h = x1sq_minus_x0sq();
        let j = h.jacobian(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(j[(0, 0)], c(-2.0, 0.0));
        assert_eq!(j[(0, 1)], c(2.0, 0.0));

        let mut r = stream(3, Domain::System, 0);
        let lin = PolySystem::sample_gaussian(&DegreeList::uniform(2, 1).unwrap(), &mut r);
        let x = random_point(&mut r, 3);
        let jl = lin.jacobian(&x);
        for i in 0..2 {
            for k in 0..3 {
                assert_eq!(jl[(i, k)], lin.polys()[i].coeffs[k]);
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut r = stream(4, Domain::System, 0);
        let h = PolySystem::sample_gaussian(&DegreeList::new(vec![3, 2]).unwrap(), &mut r);
        let x = random_point(&mut r, 3);
        let j = h.jacobian(&x);
        let eps = 1e-6;
        for k in 0..3 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += eps;
            xm[k] -= eps;
            let (fp, fm) = (h.evaluate(&xp), h.evaluate(&xm));
            for i in 0..2 {
                let fd = (fp[i] - fm[i]) / (2.0 * eps);
                assert!((fd - j[(i, k)]).norm() < 1e-7 * (1.0 + fd.norm()));
            }
        }
    }

    #[test]
    fn homogeneity_and_euler_identity() {
        let mut r = stream(5, Domain::System, 0);
        for trial in 0..100 {
            let n = 1 + trial % 3;
            let deg = DegreeList::new((0..n).map(|i| 1 + ((trial + i) % 4) as u32).collect()).unwrap();
            let h = PolySystem::sample_gaussian(&deg, &mut r);
            let x = random_point(&mut r, n + 1);
            let lam = rng::complex_gaussian(&mut r);
            let lx: Vec<Complex64> = x.iter().map(|v| v * lam).collect();
            let hl = h.evaluate(&lx);
            let hx = h.evaluate(&x);
            let diff: Vec<Complex64> = hl
                .iter()
                .zip(&hx)
                .zip(deg.as_slice())
                .map(|((a, b), &d)| a - lam.powu(d) * b)
                .collect();
            assert!(linalg::norm(&diff) <= 1e-9 * linalg::norm(&hl));

            let (val, jac) = h.eval_with_jacobian(&x);
            let jx = &jac * linalg::CVec::from_column_slice(&x);
            for i in 0..n {
                let e = jx[i] - val[i] * deg.as_slice()[i] as f64;
                let scale: f64 = jac.row(i).iter().map(|z| z.norm()).sum::<f64>() * linalg::norm(&x);
                assert!(e.norm() <= 1e-10 * scale.max(1e-300));
            }
        }
    }

    #[test]
    fn bw_inner_examples() {
        let deg = DegreeList::new(vec![2]).unwrap();
        let x0sq = PolySystem::from_terms(&deg, &[vec![(vec![2, 0], c(1.0, 0.0))]]).unwrap();
        let x0x1 = PolySystem::from_terms(&deg, &[vec![(vec![1, 1], c(1.0, 0.0))]]).unwrap();
        assert_eq!(x0sq.bw_inner(&x0sq).unwrap(), c(1.0, 0.0));
        assert_eq!(x0x1.bw_inner(&x0x1).unwrap(), c(0.5, 0.0));
        let h = x1sq_minus_x0sq().scaled(c(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        assert!((h.bw_norm() - 1.0).abs() < 1e-15);
        let other = PolySystem::zeros(&DegreeList::new(vec![3]).unwrap());
        assert!(matches!(h.bw_inner(&other), Err(Error::Shape(_))));
    }

    #[test]
    fn bw_inner_is_hermitian() {
        let mut r = stream(6, Domain::System, 0);
        let deg = DegreeList::new(vec![2, 2]).unwrap();
        let h = PolySystem::sample_gaussian(&deg, &mut r);
        let g = PolySystem::sample_gaussian(&deg, &mut r);
        let a = h.bw_inner(&g).unwrap();
        let b = g.bw_inner(&h).unwrap();
        assert!((a - b.conj()).norm() < 1e-13);
        assert!(h.bw_norm() > 0.0);
    }

    #[test]
    fn unitary_action_examples() {
        let deg = DegreeList::new(vec![2]).unwrap();
        let x0sq = PolySystem::from_terms(&deg, &[vec![(vec![2, 0], c(1.0, 0.0))]]).unwrap();
        let id = CMat::identity(2, 2);
        assert_eq!(x0sq.unitary_act(&id).unwrap().polys()[0].coeffs, x0sq.polys()[0].coeffs);
        let swap = CMat::from_row_slice(2, 2, &[ZERO, c(1.0, 0.0), c(1.0, 0.0), ZERO]);
        let swapped = x0sq.unitary_act(&swap).unwrap();
        assert_eq!(swapped.polys()[0].coeffs, vec![ZERO, ZERO, c(1.0, 0.0)]);
        let bad = CMat::identity(2, 2) * c(2.0, 0.0);
        assert!(matches!(x0sq.unitary_act(&bad), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn unitary_action_composes_pointwise_and_preserves_norm() {
        let mut r = stream(7, Domain::System, 0);
        for trial in 0..100 {
            let n = 1 + trial % 3;
            let deg = DegreeList::new((0..n).map(|i| 1 + ((trial + i) % 3) as u32).collect()).unwrap();
            let h = PolySystem::sample_gaussian(&deg, &mut r);
            let u = linalg::random_unitary(&mut r, n + 1);
            let hu = h.unitary_act(&u).unwrap();
            assert!((hu.bw_norm() - h.bw_norm()).abs() <= 1e-10 * h.bw_norm());
            let x = random_point(&mut r, n + 1);
            let ux = &u * linalg::CVec::from_column_slice(&x);
            let lhs = hu.evaluate(&x);
            let rhs = h.evaluate(ux.as_slice());
            let diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
            assert!(linalg::norm(&diff) <= 1e-10 * (1.0 + linalg::norm(&rhs)));
        }
    }

    #[test]
    fn gaussian_sampling_is_seeded() {
        let deg = DegreeList::new(vec![2, 3]).unwrap();
        let a = sample_bw_gaussian(&deg, 99);
        let b = sample_bw_gaussian(&deg, 99);
        let c2 = sample_bw_gaussian(&deg, 100);
        assert_eq!(a.polys()[1].coeffs, b.polys()[1].coeffs);
        assert_ne!(a.polys()[1].coeffs, c2.polys()[1].coeffs);
    }

    #[test]
    fn gaussian_norm_expectation_is_dimension() {
        let deg = DegreeList::new(vec![2, 3]).unwrap();
        let mut r = stream(8, Domain::System, 0);
        let m = 10_000;
        let mean: f64 = (0..m)
            .map(|_| PolySystem::sample_gaussian(&deg, &mut r).bw_norm().powi(2))
            .sum::<f64>()
            / m as f64;
        let target = deg.dim() as f64;
        assert!((mean - target).abs() <= 0.05 * target, "mean {mean} target {target}");
    }

    #[test]
    fn proj_distance_examples() {
        let mut r = stream(9, Domain::System, 0);
        let x = ProjectivePoint::new(random_point(&mut r, 3)).unwrap();
        assert!(proj_distance(&x, &x) < 1e-15);
        assert!(proj_distance(&x, &x.rotated(1.234)) < 1e-15);
        assert!(x.projectively_eq(&x.rotated(-0.4)));
        let e0 = ProjectivePoint::e0(1);
        let e1 = ProjectivePoint::new(vec![ZERO, c(1.0, 0.0)]).unwrap();
        assert!((proj_distance(&e0, &e1) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn proj_distance_is_a_metric(seed in 0u64..1000) {
            let mut r = stream(seed, Domain::Probe, 0);
            let m = 2 + (seed % 3) as usize;
            let p = |r: &mut rand_chacha::ChaCha8Rng| ProjectivePoint::new(random_point(r, m)).unwrap();
            let (x, y, z) = (p(&mut r), p(&mut r), p(&mut r));
            let dxy = proj_distance(&x, &y);
            prop_assert!((dxy - proj_distance(&y, &x)).abs() < 1e-12);
            prop_assert!((0.0..=std::f64::consts::FRAC_PI_2 + 1e-15).contains(&dxy));
            prop_assert!(proj_distance(&x, &z) <= dxy + proj_distance(&y, &z) + 1e-9);
        }
    }
}
