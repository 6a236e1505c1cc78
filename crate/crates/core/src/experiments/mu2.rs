use std::f64::consts::PI;

use num_complex::Complex64;

use super::fekete::roots_checked;
use super::{median_of_means, trials, McReport, MOM_BATCHES};
use crate::conditioning::{self, mu_univariate};
use crate::error::{Error, Result};
use crate::polyspace::binomial;
use crate::polyspace::{DegreeList, PolySystem};
use crate::rng::{self, stream, Domain};
use crate::startsys::{self, bc_pair, StartPair};
use crate::tracker::{self, great_circle, local_condition, TrackerConfig};

/// Largest Bézout number for which `E[Σμ²]` is estimated by tracking.
const MAX_TRACKED_BEZOUT: u128 = 64;
const ROOT_BACKWARD_TOL: f64 = 1e-8;
const MAX_FAILURE_RATE: f64 = 0.01;

/// `𝒟 N (n (1 + 1/n)^{n+1} − 2n − 1)` with `N` the projective dimension.
pub fn mu2_general_formula(degrees: &DegreeList) -> f64 {
    let n = degrees.n() as f64;
    let big_n = degrees.projective_dim() as f64;
    degrees.bezout() as f64 * big_n * (n * (1.0 + 1.0 / n).powf(n + 1.0) - 2.0 * n - 1.0)
}

/// The univariate closed form `d(d + 1)`.
pub fn mu2_univariate_display(d: u32) -> f64 {
    let d = d as f64;
    d * (d + 1.0)
}

fn mu2_target(degrees: &DegreeList) -> f64 {
    if degrees.n() == 1 {
        mu2_univariate_display(degrees.as_slice()[0])
    } else {
        mu2_general_formula(degrees)
    }
}

fn fail_if_invalid(rep: &McReport, what: &str) -> Result<()> {
    if rep.rejection_rate() > MAX_FAILURE_RATE {
        return Err(Error::ExperimentInvalid(format!(
            "{what} failed on {:.2}% of samples",
            100.0 * rep.rejection_rate()
        )));
    }
    Ok(())
}

fn sum_mu2_univariate(d: u32, seed: u64, i: u64) -> Option<f64> {
    let mut r = stream(seed, Domain::Target, i);
    let f: Vec<Complex64> = (0..=d)
        .map(|k| rng::complex_gaussian(&mut r) * (binomial(d as u64, k as u64) as f64).sqrt())
        .collect();
    let (roots, worst) = roots_checked(&f)?;
    (worst <= ROOT_BACKWARD_TOL && roots.len() == d as usize)
        .then(|| roots.iter().map(|&z| mu_univariate(&f, z).powi(2)).sum())
}

fn sum_mu2_tracked(start: &StartPair, degrees: &DegreeList, seed: u64, i: u64, cfg: &TrackerConfig) -> Option<f64> {
    let mut r = stream(seed, Domain::Target, i);
    let h = PolySystem::sample_sphere(degrees, &mut r);
    let path = great_circle(&start.g, &h).ok()?;
    let mut total = 0.0;
    for z in &start.zeros {
        let res = tracker::track(&path, z, cfg);
        if !res.is_success() {
            return None;
        }
        total += res.mu_end * res.mu_end;
    }
    Some(total)
}

/// Median-of-means estimate of `E_{h∈𝕊}[Σ_{h(ζ)=0} μ²(h, ζ)]`. Zeros come
/// from the companion matrix for `n = 1` and from tracking the BC start
/// system otherwise.
pub fn mc_sum_mu_squared(degrees: &DegreeList, samples: usize, seed: u64, cfg: &TrackerConfig) -> Result<McReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let raw = if degrees.n() == 1 {
        let d = degrees.as_slice()[0];
        trials(samples, |i| sum_mu2_univariate(d, seed, i))
    } else {
        if degrees.bezout() > MAX_TRACKED_BEZOUT {
            return Err(Error::InvalidInput(format!(
                "Bézout number {} exceeds {MAX_TRACKED_BEZOUT} for tracked zeros",
                degrees.bezout()
            )));
        }
        let start = bc_pair(degrees)?;
        trials(samples, |i| sum_mu2_tracked(&start, degrees, seed, i, cfg))
    };
    let rejected = raw.iter().filter(|v| v.is_none()).count();
    let vals: Vec<f64> = raw.into_iter().flatten().collect();
    let rep = median_of_means(&vals, MOM_BATCHES, Some(mu2_target(degrees)), rejected)
        .with_extra("general_formula", mu2_general_formula(degrees))
        .with_extra("bezout", degrees.bezout() as f64);
    fail_if_invalid(&rep, "zero finding")?;
    Ok(rep)
}

/// Median-of-means estimate of `E[μ²(g, ζ)]` over Beltrán–Pardo pairs, which
/// equals `E[Σμ²]/𝒟`. The largest residual `‖g(ζ)‖` is reported as
/// `max_residual`.
pub fn mc_bp_mu_squared(degrees: &DegreeList, samples: usize, seed: u64) -> Result<McReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let raw = trials(samples, |i| {
        let pair = startsys::bp_sample_indexed(degrees, seed, i);
        let z = &pair.zeros[0];
        (conditioning::mu(&pair.g, z).powi(2), startsys::residual(&pair.g, z))
    });
    let vals: Vec<f64> = raw.iter().map(|v| v.0).collect();
    let max_res = raw.iter().map(|v| v.1).fold(0.0, f64::max);
    let bez = degrees.bezout() as f64;
    Ok(median_of_means(&vals, MOM_BATCHES, Some(mu2_target(degrees) / bez), 0)
        .with_extra("general_formula", mu2_general_formula(degrees) / bez)
        .with_extra("max_residual", max_res))
}

/// `ℬ₁(g, ζ)`: average over `h ∈ 𝕊` of `∫₀^π μ(h_t, ζ_t)² dt` along the half
/// great circle through `g` and `h`, with the inner integral by the
/// trapezoid rule on `t_nodes` subintervals. Samples whose path fails are
/// discarded and counted.
pub fn estimate_b1(pair: &StartPair, samples: usize, t_nodes: usize, seed: u64, cfg: &TrackerConfig) -> Result<McReport> {
    if samples == 0 || t_nodes == 0 {
        return Err(Error::InvalidInput("samples and t_nodes must be positive".into()));
    }
    let zeta = pair
        .zeros
        .first()
        .ok_or_else(|| Error::InvalidInput("start pair has no zero".into()))?;
    let degrees = pair.g.degrees();
    let raw = trials(samples, |i| {
        let mut r = stream(seed, Domain::Target, i);
        let h = PolySystem::sample_sphere(degrees, &mut r);
        let path = great_circle(&pair.g, &h).ok()?;
        if path.t_end <= 0.0 {
            return None;
        }
        let path = path.with_t_end(PI);
        let res = tracker::track(&path, zeta, cfg);
        if !res.is_success() {
            return None;
        }
        let step = PI / t_nodes as f64;
        let mut vals = Vec::with_capacity(t_nodes + 1);
        for j in 0..=t_nodes {
            let t = step * j as f64;
            let z = tracker::zero_at(&path, &res.step_log, t)?;
            let mu = local_condition(&path, t, &z).ok()?.mu;
            vals.push(mu * mu);
        }
        Some(vals.windows(2).map(|w| 0.5 * (w[0] + w[1]) * step).sum::<f64>())
    });
    let rejected = raw.iter().filter(|v| v.is_none()).count();
    let vals: Vec<f64> = raw.into_iter().flatten().collect();
    let n = degrees.n() as f64;
    let threshold = 2f64.sqrt() * PI * n * degrees.projective_dim() as f64;
    let rep = median_of_means(&vals, MOM_BATCHES, None, rejected);
    let sqrt2_b1 = 2f64.sqrt() * rep.estimate;
    let discard = rep.rejection_rate();
    Ok(rep
        .with_extra("good_pair_threshold", threshold)
        .with_extra("sqrt2_b1", sqrt2_b1)
        .with_extra("sqrt2_b1_below_threshold", if sqrt2_b1 <= threshold { 1.0 } else { 0.0 })
        .with_extra("discard_rate", discard))
}
