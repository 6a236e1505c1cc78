use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::{mean_report, trials, McReport};
use crate::conditioning;
use crate::eigenpath::companion_roots;
use crate::error::{Error, Result};
use crate::polyspace::{binomial, Form};
use crate::polyspace::{PolySystem, ProjectivePoint};
use crate::rng::{self, stream, Domain};

/// Tolerance on `x² + y² + (z − ½)² = ¼`.
pub const SPHERE_TOL: f64 = 1e-12;

const RESTARTS: usize = 10;
const GRAD_TOL: f64 = 1e-7;
const ARMIJO: f64 = 1e-4;
const ROOT_BACKWARD_TOL: f64 = 1e-8;

/// Points on the Riemann sphere `S(½)` centred at `(0, 0, ½)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereConfiguration {
    pub points: Vec<[f64; 3]>,
}

impl SphereConfiguration {
    pub fn new(points: Vec<[f64; 3]>) -> Result<Self> {
        for p in &points {
            let r = p[0] * p[0] + p[1] * p[1] + (p[2] - 0.5) * (p[2] - 0.5) - 0.25;
            if r.abs() > SPHERE_TOL {
                return Err(Error::InvalidInput(format!("point {p:?} is off S(1/2) by {r:e}")));
            }
        }
        Ok(SphereConfiguration { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn from_unit(u: &[[f64; 3]]) -> Self {
        SphereConfiguration {
            points: u.iter().map(|v| [0.5 * v[0], 0.5 * v[1], 0.5 + 0.5 * v[2]]).collect(),
        }
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// `−Σ_{i<j} ln ‖x_i − x_j‖`; `+∞` when two points coincide.
pub fn fekete_energy(x: &SphereConfiguration) -> f64 {
    let p = &x.points;
    let mut e = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let r = dist(&p[i], &p[j]);
            if r == 0.0 {
                return f64::INFINITY;
            }
            e -= r.ln();
        }
    }
    e
}

fn plane_to_sphere(z: Complex64) -> [f64; 3] {
    let s = 1.0 + z.norm_sqr();
    [z.re / s, z.im / s, 1.0 / s]
}

/// `z ↦ (Re z, Im z, 1) / (1 + |z|²)`.
pub fn zeros_to_sphere(z: &[Complex64]) -> SphereConfiguration {
    SphereConfiguration {
        points: z.iter().map(|&zi| plane_to_sphere(zi)).collect(),
    }
}

/// The same map on projective points; `ζ₀ = 0` goes to `(0, 0, 0)`.
pub fn projective_to_sphere(zeta: &ProjectivePoint) -> [f64; 3] {
    let r = zeta.rep();
    let n2 = r[0].norm_sqr() + r[1].norm_sqr();
    let c = r[1] * r[0].conj() / n2;
    [c.re, c.im, r[0].norm_sqr() / n2]
}

/// Inverse chart `(x, y, w) ↦ (x + iy)/w`; `None` at the south pole.
pub fn sphere_to_plane(p: &[f64; 3]) -> Option<Complex64> {
    (p[2] != 0.0).then(|| Complex64::new(p[0], p[1]) / p[2])
}

fn sphere_to_projective(p: &[f64; 3]) -> ProjectivePoint {
    // (w, x + iy) and (x − iy, 1 − w) are both representatives; use the
    // one with the larger norm (√w versus √(1 − w)).
    let v = if p[2] >= 0.5 {
        vec![Complex64::new(p[2], 0.0), Complex64::new(p[0], p[1])]
    } else {
        vec![Complex64::new(p[0], -p[1]), Complex64::new(1.0 - p[2], 0.0)]
    };
    ProjectivePoint::new(v).expect("nonzero representative")
}

fn random_unit<R: Rng + ?Sized>(r: &mut R) -> [f64; 3] {
    loop {
        let v = [rng::real_gaussian(r), rng::real_gaussian(r), rng::real_gaussian(r)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// `d²/4 − d/4`.
pub fn uniform_energy_target(d: usize) -> f64 {
    let d = d as f64;
    d * d / 4.0 - d / 4.0
}

/// `d²/4 − d ln d / 4 − d/4`.
pub fn random_poly_energy_target(d: usize) -> f64 {
    let d = d as f64;
    d * d / 4.0 - d * d.ln() / 4.0 - d / 4.0
}

/// Mean energy of `d` independent uniform points on `S(½)`.
pub fn mc_energy_uniform(d: usize, samples: usize, seed: u64) -> Result<McReport> {
    if d < 2 || samples == 0 {
        return Err(Error::InvalidInput("fekete-uniform needs d ≥ 2 and samples > 0".into()));
    }
    let vals = trials(samples, |i| {
        let mut r = stream(seed, Domain::Sphere, i);
        let u: Vec<[f64; 3]> = (0..d).map(|_| random_unit(&mut r)).collect();
        fekete_energy(&SphereConfiguration::from_unit(&u))
    });
    Ok(mean_report(&vals, Some(uniform_energy_target(d)), 0))
}

/// Ascending coefficients of a univariate Bombieri–Weyl Gaussian polynomial.
fn bw_univariate<R: Rng + ?Sized>(d: usize, r: &mut R) -> Vec<Complex64> {
    (0..=d)
        .map(|k| rng::complex_gaussian(r) * (binomial(d as u64, k as u64) as f64).sqrt())
        .collect()
}

/// Roots of `f` together with the largest backward error
/// `|f(z)| / Σ|a_k||z|^k` over them.
pub(crate) fn roots_checked(coeffs: &[Complex64]) -> Option<(Vec<Complex64>, f64)> {
    let roots = companion_roots(coeffs).ok()?;
    let worst = roots
        .iter()
        .map(|&z| {
            let mut f = Complex64::new(0.0, 0.0);
            let mut scale = 0.0;
            for c in coeffs.iter().rev() {
                f = f * z + c;
                scale = scale * z.norm() + c.norm();
            }
            f.norm() / scale
        })
        .fold(0.0, f64::max);
    Some((roots, worst))
}

/// Mean energy of the zeros of random BW-Gaussian polynomials of degree `d`
/// mapped to `S(½)`.
pub fn mc_energy_random_poly(d: usize, samples: usize, seed: u64) -> Result<McReport> {
    if d < 2 || samples == 0 {
        return Err(Error::InvalidInput("fekete-poly needs d ≥ 2 and samples > 0".into()));
    }
    let raw = trials(samples, |i| {
        let mut r = stream(seed, Domain::System, i);
        let f = bw_univariate(d, &mut r);
        let (roots, worst) = roots_checked(&f)?;
        (worst <= ROOT_BACKWARD_TOL && roots.len() == d).then(|| fekete_energy(&zeros_to_sphere(&roots)))
    });
    let rejected = raw.iter().filter(|v| v.is_none()).count();
    let vals: Vec<f64> = raw.into_iter().flatten().collect();
    let rep = mean_report(&vals, Some(random_poly_energy_target(d)), rejected);
    if rep.rejection_rate() >= 0.01 {
        return Err(Error::ExperimentInvalid(format!(
            "root finding rejected {:.2}% of samples",
            100.0 * rep.rejection_rate()
        )));
    }
    Ok(rep)
}

/// Output of [`minimize_energy`].
#[derive(Debug, Clone, Serialize)]
pub struct Minimized {
    pub config: SphereConfiguration,
    pub energy: f64,
    /// Norm of the tangential gradient of `ℰ` at the returned points.
    pub grad_norm: f64,
    /// Final energy of every restart, in order.
    pub restart_energies: Vec<f64>,
    pub iterations: usize,
}

// Energy and tangential gradient in unit-sphere coordinates `u`, where
// `x = (0,0,½) + u/2`, so `ℰ = P ln 2 − Σ ln‖u_i − u_j‖`.
fn energy_unit(u: &[[f64; 3]]) -> f64 {
    let pairs = (u.len() * (u.len() - 1) / 2) as f64;
    let mut e = pairs * std::f64::consts::LN_2;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            e -= dist(&u[i], &u[j]).ln();
        }
    }
    e
}

fn tangent_grad(u: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let mut g = vec![[0.0; 3]; u.len()];
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let dx = [u[i][0] - u[j][0], u[i][1] - u[j][1], u[i][2] - u[j][2]];
            let r2 = dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2];
            for k in 0..3 {
                g[i][k] -= dx[k] / r2;
                g[j][k] += dx[k] / r2;
            }
        }
    }
    for (gi, ui) in g.iter_mut().zip(u) {
        let p = gi[0] * ui[0] + gi[1] * ui[1] + gi[2] * ui[2];
        for k in 0..3 {
            gi[k] -= p * ui[k];
        }
    }
    g
}

fn dot(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x[0] * y[0] + x[1] * y[1] + x[2] * y[2]).sum()
}

fn retract(u: &[[f64; 3]], g: &[[f64; 3]], a: f64) -> Vec<[f64; 3]> {
    u.iter()
        .zip(g)
        .map(|(ui, gi)| {
            let v = [ui[0] - a * gi[0], ui[1] - a * gi[1], ui[2] - a * gi[2]];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        })
        .collect()
}

fn descend(mut u: Vec<[f64; 3]>, iters: usize) -> (Vec<[f64; 3]>, f64, f64, usize) {
    let d = u.len();
    let mut e = energy_unit(&u);
    let mut g = tangent_grad(&u);
    let mut alpha = 1.0 / d as f64;
    let mut it = 0;
    while it < iters {
        let gg = dot(&g, &g);
        if gg.sqrt() < GRAD_TOL {
            break;
        }
        let mut a = alpha;
        let (u1, e1) = loop {
            let u1 = retract(&u, &g, a);
            let e1 = energy_unit(&u1);
            // near a minimizer ℰ differences sink below rounding; allow that much
            if e1 <= e - ARMIJO * a * gg + 8.0 * f64::EPSILON * e.abs() || a < 1e-16 {
                break (u1, e1);
            }
            a *= 0.5;
        };
        let g1 = tangent_grad(&u1);
        let s: Vec<[f64; 3]> = u1.iter().zip(&u).map(|(p, q)| [p[0] - q[0], p[1] - q[1], p[2] - q[2]]).collect();
        let y: Vec<[f64; 3]> = g1.iter().zip(&g).map(|(p, q)| [p[0] - q[0], p[1] - q[1], p[2] - q[2]]).collect();
        let sy = dot(&s, &y);
        alpha = if sy > 0.0 { (dot(&s, &s) / sy).clamp(1e-10, 1e3) } else { 1.0 / d as f64 };
        u = u1;
        e = e1;
        g = g1;
        it += 1;
    }
    let gn = dot(&g, &g).sqrt();
    (u, e, gn, it)
}

/// Projected Barzilai–Borwein gradient descent on `ℰ` over `S(½)^d` with an
/// Armijo backtracking safeguard, from `RESTARTS` random starts; returns the
/// lowest-energy configuration found.
pub fn minimize_energy(d: usize, iters: usize, seed: u64) -> Result<Minimized> {
    if d < 2 {
        return Err(Error::InvalidInput("fekete-min needs d ≥ 2".into()));
    }
    let runs = trials(RESTARTS, |i| {
        let mut r = stream(seed, Domain::Fekete, i);
        let u0: Vec<[f64; 3]> = (0..d).map(|_| random_unit(&mut r)).collect();
        descend(u0, iters)
    });
    let restart_energies: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let iterations = runs.iter().map(|r| r.3).sum();
    let (u, e, gn, _) = runs
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one restart");
    Ok(Minimized {
        config: SphereConfiguration::from_unit(&u),
        energy: e,
        // dℰ/dx = 2 dℰ/du
        grad_norm: 2.0 * gn,
        restart_energies,
        iterations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyBoundReport {
    pub energy: f64,
    pub max_mu: f64,
    /// `√(d(d+1))`.
    pub bound: f64,
    pub holds: bool,
    /// The bound is stated for true minimizers; the configuration checked is
    /// only a local minimizer.
    pub local_minimizer_only: bool,
}

/// Build `h = Π (ζ_{i,1} x₀ − ζ_{i,0} x₁)` with the given points as zeros and
/// compare `max_i μ(h, ζ_i)` with `√(d(d+1))`.
pub fn shsm_energy_bound_check(x: &SphereConfiguration) -> Result<EnergyBoundReport> {
    if x.len() < 2 {
        return Err(Error::InvalidInput("need at least two points".into()));
    }
    let zeros: Vec<ProjectivePoint> = x.points.iter().map(sphere_to_projective).collect();
    let mut f = Form::constant(2, Complex64::new(1.0, 0.0));
    for z in &zeros {
        let r = z.rep();
        f = f.mul(&Form::linear(&[r[1], -r[0]]));
    }
    let h = PolySystem::from_forms(vec![f])?;
    let max_mu = zeros.iter().map(|z| conditioning::mu(&h, z)).fold(0.0, f64::max);
    let d = x.len() as f64;
    let bound = (d * (d + 1.0)).sqrt();
    Ok(EnergyBoundReport {
        energy: fekete_energy(x),
        max_mu,
        bound,
        holds: max_mu <= bound,
        local_minimizer_only: true,
    })
}
