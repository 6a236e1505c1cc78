//! Affine and projective Newton operators and approximate-zero certificates.

use num_complex::Complex64;
use serde::Serialize;

use crate::conditioning::{self, RANK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::polyspace::{proj_distance, AffineSystem, PolySystem, ProjectivePoint};

/// Constant of the μ-theorem.
pub const U0: f64 = 0.17586;
/// Maximum number of iterations when refining a reference zero.
pub const REFERENCE_ITERS: usize = 50;
/// Step length below which reference refinement stops.
pub const REFERENCE_STEP_TOL: f64 = 1e-14;
/// Distances below this are treated as rounding noise by the convergence probe.
pub const PROBE_FLOOR: f64 = 1e-14;

/// Least-squares/inverse solve through the SVD of a square matrix. Returns the
/// solution and the singular values, or `None` on numerical rank deficiency.
pub(crate) fn svd_solve(a: &CMat, b: &[Complex64]) -> (Option<CVec>, Vec<f64>) {
    let dec = linalg::svd(a);
    let smax = dec.s.first().copied().unwrap_or(0.0);
    let smin = dec.s.last().copied().unwrap_or(0.0);
    if !(smax > 0.0) || smin <= RANK_TOL * smax {
        return (None, dec.s);
    }
    let rhs = dec.u.adjoint() * CVec::from_column_slice(b);
    let scaled = CVec::from_iterator(rhs.len(), rhs.iter().zip(&dec.s).map(|(c, s)| c / *s));
    (Some(&dec.v * scaled), dec.s)
}

fn rank_ratio(s: &[f64]) -> f64 {
    match (s.first(), s.last()) {
        (Some(&a), Some(&b)) if a > 0.0 => b / a,
        _ => 0.0,
    }
}

/// `z − Df(z)^{-1} f(z)`.
pub fn newton_affine(f: &AffineSystem, z: &[Complex64]) -> Result<Vec<Complex64>> {
    let (sol, s) = svd_solve(&f.jacobian(z), &f.evaluate(z));
    let y = sol.ok_or(Error::SingularJacobian(rank_ratio(&s)))?;
    Ok(z.iter().zip(y.iter()).map(|(a, b)| a - b).collect())
}

/// One projective Newton step together with the data computed on the way.
#[derive(Debug, Clone)]
pub struct NewtonStep {
    pub next: ProjectivePoint,
    /// `‖(Dh(z)|_{z^⊥})^{-1} h(z)‖` for the unit representative `z`.
    pub step_len: f64,
    /// `μ(h, z)` at the starting point.
    pub mu: f64,
    /// `‖h(z)‖` at the starting point.
    pub residual: f64,
}

/// Projective Newton step from `z`, reporting `μ(h, z)` as a by-product.
pub fn newton_step(h: &PolySystem, z: &ProjectivePoint) -> Result<NewtonStep> {
    newton_step_with_norm(h, h.bw_norm(), z)
}

/// As [`newton_step`] with `‖h‖` supplied by the caller.
pub fn newton_step_with_norm(h: &PolySystem, hnorm: f64, z: &ProjectivePoint) -> Result<NewtonStep> {
    let (val, jac) = h.eval_with_jacobian(z.rep());
    newton_step_from_parts(z, &val, &jac, h.degrees().as_slice(), hnorm)
}

/// Projective Newton step from precomputed `h(z)` and `Dh(z)` at a unit `z`.
pub fn newton_step_from_parts(
    z: &ProjectivePoint,
    val: &[Complex64],
    jac: &CMat,
    degrees: &[u32],
    hnorm: f64,
) -> Result<NewtonStep> {
    let x = z.rep();
    let basis = linalg::orthogonal_complement(x);
    // Row scaling leaves the solution unchanged and gives μ from the same SVD.
    let scaled = conditioning::scaled_restricted(jac, &basis, degrees, 1.0);
    let rhs: Vec<Complex64> = val
        .iter()
        .zip(degrees)
        .map(|(v, &d)| v / (d as f64).sqrt())
        .collect();
    let (sol, s) = svd_solve(&scaled, &rhs);
    let y = sol.ok_or(Error::SingularJacobian(rank_ratio(&s)))?;
    let mu = hnorm / s.last().copied().unwrap_or(0.0);
    let step = &basis * &y;
    let next: Vec<Complex64> = x.iter().zip(step.iter()).map(|(a, b)| a - b).collect();
    Ok(NewtonStep {
        next: ProjectivePoint::new(next)?,
        step_len: y.norm(),
        mu,
        residual: linalg::norm(val),
    })
}

/// `z ↦ z − (Dh(z)|_{z^⊥})^{-1} h(z)`, renormalized.
pub fn newton_projective(h: &PolySystem, z: &ProjectivePoint) -> Result<ProjectivePoint> {
    newton_step(h, z).map(|s| s.next)
}

/// μ-theorem certificate evaluated at a computed point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub certified: bool,
    pub radius: f64,
    pub mu_at_point: f64,
    pub newton_step_len: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// `radius = u_0 / (d^{3/2} μ(h, z))`; certified when the Newton step is at
/// most half the radius.
pub fn certify_approximate_zero(h: &PolySystem, z: &ProjectivePoint) -> Certificate {
    let d = h.degrees().max_degree() as f64;
    match newton_step(h, z) {
        Ok(step) => {
            let radius = U0 / (d.powf(1.5) * step.mu);
            let certified = step.step_len <= radius / 2.0;
            Certificate {
                certified,
                radius,
                mu_at_point: step.mu,
                newton_step_len: step.step_len,
                reason: (!certified).then(|| "Newton step exceeds half the certified radius".to_string()),
            }
        }
        Err(e) => Certificate {
            certified: false,
            radius: 0.0,
            mu_at_point: f64::INFINITY,
            newton_step_len: f64::INFINITY,
            reason: Some(e.to_string()),
        },
    }
}

/// Iterate projective Newton until the step drops below `1e-14` (at most 50 times).
pub fn refine_reference_zero(h: &PolySystem, z: &ProjectivePoint) -> Result<ProjectivePoint> {
    let mut cur = z.clone();
    for _ in 0..REFERENCE_ITERS {
        let step = newton_step(h, &cur)?;
        cur = step.next;
        if step.step_len < REFERENCE_STEP_TOL {
            break;
        }
    }
    Ok(cur)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    /// `d_R(z_j, ζ)` for `j = 0..=k` (shorter when the probe diverged).
    pub distances: Vec<f64>,
    /// Every `d_R(z_j, ζ) ≤ 1.1 · 2^{−(2^j−1)} d_R(z_0, ζ)`, up to rounding noise.
    pub contraction_holds: bool,
    pub diverged: bool,
}

/// Run `k` Newton steps from `z` and compare against the doubling contraction
/// toward the reference zero `zeta`.
pub fn quadratic_convergence_probe(h: &PolySystem, z: &ProjectivePoint, zeta: &ProjectivePoint, k: usize) -> ProbeResult {
    let mut distances = vec![proj_distance(z, zeta)];
    let mut cur = z.clone();
    let mut diverged = false;
    for _ in 0..k {
        match newton_projective(h, &cur) {
            Ok(next) => {
                let dist = proj_distance(&next, zeta);
                cur = next;
                distances.push(dist);
                if dist > std::f64::consts::FRAC_PI_4 {
                    diverged = true;
                    break;
                }
            }
            Err(_) => {
                diverged = true;
                break;
            }
        }
    }
    let d0 = distances[0];
    let contraction_holds = !diverged
        && distances.iter().enumerate().all(|(j, &dj)| {
            let bound = 1.1 * d0 / 2f64.powi((1i32 << j.min(30)) - 1);
            dj <= bound.max(PROBE_FLOOR)
        });
    ProbeResult {
        distances,
        contraction_holds,
        diverged,
    }
}
