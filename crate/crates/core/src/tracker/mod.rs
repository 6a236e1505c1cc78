//! Condition-adaptive path tracking with projective Newton corrections.
//!
//! Each step advances `t` by `Δt = λ0 / (d^{3/2} μ(h_t, z)² ‖ḣ_t‖)` and then
//! applies a fixed number of projective Newton iterations at `h_{t+Δt}`. A
//! step is kept when the corrector contracts (last step at most half the
//! first) and its first step lies inside the μ-theorem radius; otherwise `Δt`
//! is halved. There is no predictor.

mod path;

pub use path::{eval_point_homotopy, eval_point_system, great_circle, segment, LocalEval, PathKind, PathSpec};

use num_complex::Complex64;
use serde::Serialize;

use crate::conditioning;
use crate::error::{Error, Result};
use crate::linalg;
use crate::newton::{self, newton_step_from_parts, Certificate, U0};
use crate::polyspace::ProjectivePoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrackerConfig {
    pub lambda0: f64,
    /// Cap on accepted plus rejected steps.
    pub max_steps: usize,
    pub newton_iters_per_step: usize,
    pub shrink: f64,
    pub grow: f64,
    /// Floor for `‖ḣ_t‖` in the step rule.
    pub hdot_floor: f64,
    /// `μ` above this aborts the path.
    pub mu_max: f64,
    /// Newton iterations applied at the end of the path.
    pub refine_steps: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            lambda0: 0.05,
            max_steps: 1_000_000,
            newton_iters_per_step: 3,
            shrink: 0.5,
            grow: 1.25,
            hdot_floor: 1e-12,
            mu_max: 1e14,
            refine_steps: 5,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lambda0 > 0.0
            && self.lambda0 <= 1.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.grow > 1.0
            && self.grow <= 2.0
            && self.newton_iters_per_step >= 1
            && self.max_steps >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("tracker configuration out of range: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrackStatus {
    Success,
    StepLimit,
    SingularEncounter,
    /// The path was followed to the end but the endpoint failed certification.
    Uncertified,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub t: f64,
    pub mu: f64,
    pub dt: f64,
    /// Length of the last corrector step.
    pub newton_residual: f64,
    #[serde(skip)]
    pub z: ProjectivePoint,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrackResult {
    pub status: TrackStatus,
    #[serde(skip)]
    pub endpoint: ProjectivePoint,
    /// Accepted steps.
    pub steps: usize,
    pub rejections: usize,
    #[serde(skip)]
    pub step_log: Vec<StepRecord>,
    pub l_kappa_estimate: f64,
    pub certificate: Certificate,
    /// `‖h_{t_end}(z)‖ / ‖h_{t_end}‖` at the (unit) endpoint.
    pub residual: f64,
    pub mu_start: f64,
    pub mu_end: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl TrackResult {
    pub fn is_success(&self) -> bool {
        self.status == TrackStatus::Success
    }
}

/// `μ(h_t, z)`, `‖ζ̇‖` and the condition-length integrand at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCondition {
    pub mu: f64,
    pub zeta_dot: f64,
    pub speed: f64,
    pub integrand: f64,
}

/// `μ(h_t, z) · ‖(ḣ_t, ζ̇_t)‖` with `ζ̇ = (Dh_t(z)|_{z^⊥})^{-1} ḣ_t(z)`.
pub fn local_condition(path: &PathSpec, t: f64, z: &ProjectivePoint) -> Result<LocalCondition> {
    let x = z.rep();
    let loc = path.local(t, x);
    let degrees = path.degrees();
    let basis = linalg::orthogonal_complement(x);
    let scaled = conditioning::scaled_restricted(&loc.jac, &basis, degrees, 1.0);
    let rhs: Vec<Complex64> = loc
        .dval
        .iter()
        .zip(degrees)
        .map(|(v, &d)| v / (d as f64).sqrt())
        .collect();
    let (sol, s) = newton::svd_solve(&scaled, &rhs);
    let smin = s.last().copied().unwrap_or(0.0);
    let y = sol.ok_or(Error::SingularJacobian(smin / s.first().copied().unwrap_or(1.0)))?;
    let mu = loc.hnorm / smin;
    // ḣ is taken relative to ‖h_t‖ so that segments and arcs are measured alike
    let zeta_dot = y.norm() / loc.hnorm;
    let speed = path.speed(t);
    Ok(LocalCondition {
        mu,
        zeta_dot,
        speed,
        integrand: mu * (speed * speed + zeta_dot * zeta_dot).sqrt(),
    })
}

struct Correction {
    z: ProjectivePoint,
    first: f64,
    last: f64,
    mu: f64,
}

fn correct(path: &PathSpec, t: f64, z: &ProjectivePoint, iters: usize) -> Result<Correction> {
    let degrees = path.degrees();
    let hnorm = path.norm_at(t);
    let mut cur = z.clone();
    let mut first = 0.0;
    let mut last = 0.0;
    let mut mu = f64::INFINITY;
    for k in 0..iters {
        let loc = path.local(t, cur.rep());
        let step = newton_step_from_parts(&cur, &loc.val, &loc.jac, degrees, hnorm)?;
        if k == 0 {
            first = step.step_len;
            mu = step.mu;
        }
        last = step.step_len;
        cur = step.next;
    }
    Ok(Correction { z: cur, first, last, mu })
}

/// Follow the zero `z0` of `h_0` along `path`.
pub fn track(path: &PathSpec, z0: &ProjectivePoint, cfg: &TrackerConfig) -> TrackResult {
    let degrees = path.degrees();
    let d32 = (degrees.iter().copied().max().unwrap_or(1) as f64).powf(1.5);
    let linear = degrees.iter().all(|&d| d == 1);
    let te = path.t_end;

    let mut z = z0.clone();
    let mut t = 0.0;
    let mut steps = 0;
    let mut rejections = 0;
    let mut mult = 1.0f64;
    let mut lk = 0.0;
    let mut log = Vec::new();

    let fail = |status, z: ProjectivePoint, steps, rejections, log: Vec<StepRecord>, lk, mu_start, msg: String| {
        let cert = newton::certify_approximate_zero(&path.system_at(te), &z);
        TrackResult {
            status,
            residual: relative_residual(path, te, &z),
            endpoint: z,
            steps,
            rejections,
            step_log: log,
            l_kappa_estimate: lk,
            mu_end: cert.mu_at_point,
            certificate: cert,
            mu_start,
            message: Some(msg),
        }
    };

    let mut cur = match local_condition(path, 0.0, &z) {
        Ok(c) if c.mu <= cfg.mu_max => c,
        Ok(c) => {
            return fail(TrackStatus::SingularEncounter, z, 0, 0, log, 0.0, c.mu, format!("μ = {:e} at the start", c.mu));
        }
        Err(e) => return fail(TrackStatus::SingularEncounter, z, 0, 0, log, 0.0, f64::INFINITY, e.to_string()),
    };
    let mu_start = cur.mu;
    log.push(StepRecord {
        t: 0.0,
        mu: cur.mu,
        dt: 0.0,
        newton_residual: 0.0,
        z: z.clone(),
    });

    while t < te {
        if steps + rejections >= cfg.max_steps {
            let msg = format!("stopped at t = {t} after {} attempts", steps + rejections);
            return fail(TrackStatus::StepLimit, z, steps, rejections, log, lk, mu_start, msg);
        }
        let remaining = te - t;
        let dt = if linear {
            mult * remaining
        } else {
            let raw = mult * cfg.lambda0 / (d32 * cur.mu * cur.mu * cur.speed.max(cfg.hdot_floor));
            raw.min(remaining)
        };
        let t1 = if dt >= remaining { te } else { t + dt };
        if t1 <= t {
            let msg = format!("step size underflow at t = {t}");
            return fail(TrackStatus::SingularEncounter, z, steps, rejections, log, lk, mu_start, msg);
        }
        let accepted = match correct(path, t1, &z, cfg.newton_iters_per_step) {
            Ok(c) => {
                let contracts = c.last <= c.first / 2.0 || c.first < 1e-13;
                // Newton is exact on linear systems, so the radius test only applies otherwise
                let inside = linear || c.first <= U0 / (d32 * c.mu);
                (contracts && inside && c.mu <= cfg.mu_max).then_some(c)
            }
            Err(_) => None,
        };
        match accepted {
            Some(c) => {
                let next = match local_condition(path, t1, &c.z) {
                    Ok(n) if n.mu <= cfg.mu_max => n,
                    Ok(n) => {
                        let msg = format!("μ = {:e} at t = {t1}", n.mu);
                        return fail(TrackStatus::SingularEncounter, c.z, steps, rejections, log, lk, mu_start, msg);
                    }
                    Err(e) => {
                        return fail(TrackStatus::SingularEncounter, c.z, steps, rejections, log, lk, mu_start, e.to_string())
                    }
                };
                lk += 0.5 * (cur.integrand + next.integrand) * (t1 - t);
                t = t1;
                z = c.z;
                cur = next;
                steps += 1;
                mult = (mult * cfg.grow).min(1.0);
                log.push(StepRecord {
                    t,
                    mu: cur.mu,
                    dt,
                    newton_residual: c.last,
                    z: z.clone(),
                });
            }
            None => {
                rejections += 1;
                mult *= cfg.shrink;
            }
        }
    }

    let target = path.system_at(te);
    let hnorm = target.bw_norm();
    for _ in 0..cfg.refine_steps {
        match newton::newton_step_with_norm(&target, hnorm, &z) {
            Ok(s) => {
                let small = s.step_len < 1e-15;
                z = s.next;
                if small {
                    break;
                }
            }
            Err(_) => break,
        }
    }
    if linear && te > 0.0 {
        lk = condition_length(path, &log, 64);
    }
    let certificate = newton::certify_approximate_zero(&target, &z);
    let status = if certificate.certified {
        TrackStatus::Success
    } else {
        TrackStatus::Uncertified
    };
    TrackResult {
        status,
        residual: relative_residual(path, te, &z),
        endpoint: z,
        steps,
        rejections,
        step_log: log,
        l_kappa_estimate: lk,
        mu_end: certificate.mu_at_point,
        message: certificate.reason.clone(),
        certificate,
        mu_start,
    }
}

fn relative_residual(path: &PathSpec, t: f64, z: &ProjectivePoint) -> f64 {
    let loc = path.local(t, z.rep());
    linalg::norm(&loc.val) / loc.hnorm
}

/// `ζ_t` recovered by Newton at `h_t` from the logged point nearest to `t`.
pub fn zero_at(path: &PathSpec, log: &[StepRecord], t: f64) -> Option<ProjectivePoint> {
    let idx = log.partition_point(|r| r.t < t);
    let near = match (idx.checked_sub(1), log.get(idx)) {
        (Some(a), Some(b)) => {
            if (t - log[a].t) <= (b.t - t) {
                &log[a]
            } else {
                b
            }
        }
        (Some(a), None) => &log[a],
        (None, Some(b)) => b,
        (None, None) => return None,
    };
    let mut z = near.z.clone();
    let degrees = path.degrees();
    let hn = path.norm_at(t);
    for _ in 0..5 {
        let loc = path.local(t, z.rep());
        match newton_step_from_parts(&z, &loc.val, &loc.jac, degrees, hn) {
            Ok(s) => {
                let small = s.step_len < 1e-14;
                z = s.next;
                if small {
                    break;
                }
            }
            Err(_) => break,
        }
    }
    Some(z)
}

/// Trapezoid estimate of `∫ μ(h_t, ζ_t) ‖(ḣ_t, ζ̇_t)‖ dt` on `num_samples`
/// equal subintervals, with `ζ_t` from [`zero_at`].
pub fn condition_length(path: &PathSpec, log: &[StepRecord], num_samples: usize) -> f64 {
    let te = path.t_end;
    if te <= 0.0 || log.is_empty() || num_samples == 0 {
        return 0.0;
    }
    let vals: Vec<f64> = (0..=num_samples)
        .map(|j| {
            let t = te * j as f64 / num_samples as f64;
            zero_at(path, log, t)
                .and_then(|z| local_condition(path, t, &z).ok())
                .map_or(f64::INFINITY, |c| c.integrand)
        })
        .collect();
    let h = te / num_samples as f64;
    vals.windows(2).map(|w| 0.5 * (w[0] + w[1]) * h).sum()
}

/// Lower bound `|ln(μ_a/μ_b) − ln √(n+1)| / (d^{3/2} √(n+1))` on the
/// condition length of any path joining the two endpoints.
pub fn condition_length_lower_bound(n: usize, d: u32, mu_start: f64, mu_end: f64) -> f64 {
    let s = ((n + 1) as f64).sqrt();
    ((mu_start / mu_end).ln() - s.ln()).abs() / ((d as f64).powf(1.5) * s)
}

/// Step log as CSV with columns `step,t,mu,dt,newton_residual`.
pub fn step_log_csv(log: &[StepRecord]) -> String {
    let mut out = String::from("step,t,mu,dt,newton_residual\n");
    for (i, r) in log.iter().enumerate() {
        out.push_str(&format!("{i},{},{},{},{}\n", r.t, r.mu, r.dt, r.newton_residual));
    }
    out
}
