//! Acceptance run: one PASS/FAIL line per criterion, each with its measured
//! quantities and wall time against the budget. Exits 0 unless
//! `ACCEPTANCE_STRICT` is set, so that honest failures are reported without
//! hiding the remaining test binaries.

mod common;

use std::time::{Duration, Instant};

use num_complex::Complex64;
use polyhom::conditioning::{distance_to_rank_deficient, mu};
use polyhom::eigenpath::track_all_from_diagonal;
use polyhom::experiments::{
    mc_bp_mu_squared, mc_energy_random_poly, mc_energy_uniform, mc_sum_mu_squared, minimize_energy,
    random_poly_energy_target, uniform_energy_target,
};
use polyhom::linalg::{gaussian_matrix, CMat, CVec};
use polyhom::newton::{quadratic_convergence_probe, refine_reference_zero, U0};
use polyhom::polyspace::{proj_distance, DegreeList, PolySystem, ProjectivePoint};
use polyhom::rng::{complex_gaussian, stream, Domain};
use polyhom::roundoff::{delta_bound, run_perturbed, sandwich_check, BoundKind, PerturbationMode, PerturbationModel};
use polyhom::startsys::{bc_pair, bp_sample_indexed, shsm_pair};
use polyhom::tracker::{condition_length_lower_bound, great_circle, track, TrackResult, TrackerConfig};
use rand::Rng;

const SEED: u64 = 20_240_611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    budget: Duration,
}

fn report(c: &Criterion, o: &Outcome, elapsed: Duration) -> bool {
    let in_time = elapsed <= c.budget;
    let pass = o.pass && in_time;
    println!(
        "criterion {:>2} {} {}: {} [{:.2}s of {}s{}]",
        c.id,
        if pass { "PASS" } else { "FAIL" },
        c.name,
        o.detail,
        elapsed.as_secs_f64(),
        c.budget.as_secs(),
        if in_time { "" } else { ", over budget" }
    );
    pass
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn univariate_mu2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for d in [3u32, 5] {
        let deg = DegreeList::new(vec![d]).unwrap();
        let rep = mc_sum_mu_squared(&deg, 200_000, SEED, &TrackerConfig::default()).unwrap();
        pass &= rep.within_rel(0.10);
        parts.push(format!(
            "d={d}: {:.3} ± {:.3} vs target {} (closed form over all zeros {})",
            rep.estimate,
            rep.stderr,
            rep.target.unwrap(),
            rep.extra["general_formula"]
        ));
    }
    outcome(pass, parts.join("; "))
}

fn degree_tuples(n: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=max).map(move |d| {
                    let mut t = t.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    out
}

fn shsm_minimal() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 1..=5 {
        for degs in degree_tuples(n, 4) {
            let s = shsm_pair(&DegreeList::new(degs).unwrap());
            worst = worst.max((mu(&s.g, &s.zeros[0]) - (n as f64).sqrt()).abs());
            count += 1;
        }
    }
    outcome(worst <= 1e-10, format!("{count} degree lists, max |μ − √n| = {worst:.2e}"))
}

fn bc_bound() -> Outcome {
    let mut worst_ratio = 0.0f64;
    let mut zeros = 0;
    for n in 1..=3usize {
        for d in 1..=3u32 {
            let bc = bc_pair(&DegreeList::uniform(n, d).unwrap()).unwrap();
            let bound = 2.0 * ((n + 1) as f64).powi(d as i32);
            for z in &bc.zeros {
                worst_ratio = worst_ratio.max(mu(&bc.g, z) / bound);
                zeros += 1;
            }
        }
    }
    outcome(worst_ratio <= 1.0, format!("{zeros} zeros, max μ/bound = {worst_ratio:.4}"))
}

fn fekete_uniform() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for d in [2usize, 5, 10] {
        let rep = mc_energy_uniform(d, 100_000, SEED).unwrap();
        let target = uniform_energy_target(d);
        let ok = rep.within_stderr(3.0) && (d != 10 || (rep.estimate - target).abs() <= 0.01 * target);
        pass &= ok;
        parts.push(format!("d={d}: {:.4} ± {:.4} vs {target}", rep.estimate, rep.stderr));
    }
    outcome(pass, parts.join("; "))
}

fn fekete_random_poly() -> Outcome {
    let rep = mc_energy_random_poly(10, 10_000, SEED).unwrap();
    let target = random_poly_energy_target(10);
    outcome(
        (rep.estimate - target).abs() <= 0.3,
        format!(
            "{:.4} ± {:.4} vs {target:.4} (rejected {})",
            rep.estimate, rep.stderr, rep.rejected
        ),
    )
}

fn fekete_window() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for d in [20usize, 50] {
        let m = minimize_energy(d, 20_000, SEED).unwrap();
        let df = d as f64;
        let base = df * df / 4.0 - df * df.ln() / 4.0;
        let (lo, hi) = (base - 0.4375 * df, base - 0.37 * df + 0.2 * df);
        pass &= (lo..=hi).contains(&m.energy);
        parts.push(format!("d={d}: {:.4} in [{lo:.4}, {hi:.4}], grad {:.1e}", m.energy, m.grad_norm));
    }
    outcome(pass, parts.join("; "))
}

struct TrackingSummary {
    per_case: Vec<String>,
    paths: usize,
    succeeded: usize,
    bad_endpoints: usize,
    /// Targets where two successful paths reached the same zero.
    collisions: usize,
    lb_checked: usize,
    lb_violations: usize,
    worst_step_ratio: f64,
}

fn tracking_campaign() -> TrackingSummary {
    let cfg = TrackerConfig::default();
    let mut s = TrackingSummary {
        per_case: Vec::new(),
        paths: 0,
        succeeded: 0,
        bad_endpoints: 0,
        collisions: 0,
        lb_checked: 0,
        lb_violations: 0,
        worst_step_ratio: 0.0,
    };
    for degs in [vec![3u32], vec![2, 2], vec![2, 2, 2]] {
        let deg = DegreeList::new(degs).unwrap();
        let n = deg.n();
        let d = deg.max_degree();
        let bc = bc_pair(&deg).unwrap();
        let (mut ok, mut total) = (0, 0);
        for i in 0..100 {
            let mut r = stream(SEED, Domain::Target, (n * 1000 + i) as u64);
            let h = PolySystem::sample_gaussian(&deg, &mut r);
            let path = great_circle(&bc.g, &h.normalized()).unwrap();
            let results: Vec<TrackResult> = bc.zeros.iter().map(|z| track(&path, z, &cfg)).collect();
            let good: Vec<&TrackResult> = results.iter().filter(|r| r.is_success()).collect();
            total += results.len();
            ok += good.len();
            for r in &good {
                if !r.certificate.certified || r.residual > 1e-10 {
                    s.bad_endpoints += 1;
                }
                s.lb_checked += 1;
                if r.l_kappa_estimate < condition_length_lower_bound(n, d, r.mu_start, r.mu_end) {
                    s.lb_violations += 1;
                }
                if r.l_kappa_estimate > 0.0 {
                    let ratio = r.steps as f64 / ((d as f64).powf(1.5) * r.l_kappa_estimate / cfg.lambda0);
                    s.worst_step_ratio = s.worst_step_ratio.max(ratio);
                }
            }
            let distinct = good
                .iter()
                .enumerate()
                .all(|(a, x)| good[a + 1..].iter().all(|y| proj_distance(&x.endpoint, &y.endpoint) > 1e-8));
            if !distinct {
                s.collisions += 1;
            }
        }
        s.paths += total;
        s.succeeded += ok;
        s.per_case.push(format!("{:?}: {ok}/{total}", deg.as_slice()));
    }
    s
}

fn probe_theorem() -> Outcome {
    let combos = [vec![2u32], vec![3], vec![2, 2], vec![2, 3], vec![2, 2, 2]];
    let trials = 10_000u64;
    let mut held = 0;
    for i in 0..trials {
        let deg = DegreeList::new(combos[(i % combos.len() as u64) as usize].clone()).unwrap();
        let pair = bp_sample_indexed(&deg, SEED, i);
        let zeta = refine_reference_zero(&pair.g, &pair.zeros[0]).unwrap();
        let m = mu(&pair.g, &zeta);
        let radius = U0 / ((deg.max_degree() as f64).powf(1.5) * m);
        let mut r = stream(SEED, Domain::Probe, i);
        let z = zeta.rep();
        let w: Vec<Complex64> = (0..z.len()).map(|_| complex_gaussian(&mut r)).collect();
        let proj: Complex64 = z.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
        let w: Vec<Complex64> = w.iter().zip(z).map(|(b, a)| b - a * proj).collect();
        let wn = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let dist = radius * r.random::<f64>();
        let start: Vec<Complex64> = z.iter().zip(&w).map(|(a, b)| a * dist.cos() + b * (dist.sin() / wn)).collect();
        let probe = quadratic_convergence_probe(&pair.g, &ProjectivePoint::new(start).unwrap(), &zeta, 4);
        if probe.contraction_holds {
            held += 1;
        }
    }
    let rate = held as f64 / trials as f64;
    outcome(rate >= 0.999, format!("{held}/{trials} trials contract as 2^(1−2^k), k ≤ 4"))
}

fn bp_statistics() -> Outcome {
    let deg = DegreeList::new(vec![3]).unwrap();
    let rep = mc_bp_mu_squared(&deg, 100_000, SEED).unwrap();
    let max_res = rep.extra["max_residual"];
    let target = 4.0;
    outcome(
        max_res <= 1e-12 && (rep.estimate - target).abs() <= 0.1 * target,
        format!(
            "max residual {max_res:.1e}; E[μ²] = {:.4} ± {:.4} vs {target} (closed form per zero {})",
            rep.estimate, rep.stderr, rep.extra["general_formula"]
        ),
    )
}

fn eckart_young() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let m = 1 + (i % 6) as usize;
        let n = m + (i / 6 % 3) as usize;
        let mut r = stream(SEED, Domain::Matrix, i);
        let a = gaussian_matrix(&mut r, m, n);
        let (dist, resid) = common::truncation_distance(&a);
        worst = worst.max((distance_to_rank_deficient(&a) - dist).abs()).max(resid);
    }
    outcome(worst <= 1e-10, format!("100 matrices up to 6×8, max discrepancy {worst:.1e}"))
}

fn random_inputs(kind: BoundKind, r: &mut impl Rng) -> Vec<f64> {
    loop {
        let n = match kind {
            BoundKind::SumPair => 2,
            _ => r.random_range(2..=6),
        };
        let x: Vec<f64> = (0..n)
            .map(|_| {
                let v = r.random_range(0.1..10.0);
                let neg = kind != BoundKind::SumNNonneg && r.random::<bool>();
                if neg {
                    -v
                } else {
                    v
                }
            })
            .collect();
        if x.iter().sum::<f64>().abs() > 1e-2 {
            return x;
        }
    }
}

fn roundoff_soundness() -> Outcome {
    let eps = 1e-6;
    let mut parts = Vec::new();
    let mut pass = true;
    for (k, kind) in [BoundKind::ProductN, BoundKind::SumPair, BoundKind::SumNNonneg, BoundKind::SumN]
        .into_iter()
        .enumerate()
    {
        let mut r = stream(SEED, Domain::Roundoff, 1000 + k as u64);
        let mut worst = 0.0f64;
        for i in 0..100u64 {
            let x = random_inputs(kind, &mut r);
            let delta = delta_bound(kind, &x, eps).unwrap();
            let model = PerturbationModel::new(delta, PerturbationMode::AdversarialSearch { trials: 10_000 }).unwrap();
            let run = run_perturbed(&kind.program(&x).unwrap(), &x, &model, SEED ^ i).unwrap();
            worst = worst.max(run.rel_error / eps);
        }
        pass &= worst < 1.0;
        parts.push(format!("{kind:?} worst error {worst:.3}ε"));
    }
    let mut r = stream(SEED, Domain::Roundoff, 0);
    let sandwich = (0..100_000).all(|_| sandwich_check(r.random_range(-1.0..=1.0), r.random_range(1..=1000)));
    pass &= sandwich;
    parts.push(format!("elementary inequality on 10^5 (u, n): {}", if sandwich { "holds" } else { "violated" }));
    outcome(pass, parts.join("; "))
}

fn eigenpath_oracle() -> Outcome {
    let n = 4;
    let s = (n as f64).sqrt();
    let a0 = CMat::from_diagonal(&CVec::from_fn(n, |k, _| {
        Complex64::from_polar(s, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
    }));
    let cfg = TrackerConfig::default();
    let (mut worst, mut min_mu, mut failures) = (0.0f64, f64::INFINITY, 0);
    for i in 0..50u64 {
        let mut r = stream(SEED, Domain::Matrix, 10_000 + i);
        let a1 = gaussian_matrix(&mut r, n, n);
        let tracks = track_all_from_diagonal(&a0, &a1, &cfg).unwrap();
        failures += tracks.iter().filter(|t| t.status != polyhom::tracker::TrackStatus::Success).count();
        min_mu = tracks.iter().flat_map(|t| &t.log).map(|s| s.mu_eig).fold(min_mu, f64::min);
        let got: Vec<Complex64> = tracks.iter().map(|t| t.end.lambda).collect();
        worst = worst.max(common::match_distance(&got, &common::aberth_roots(&common::char_poly(&a1))));
    }
    outcome(
        failures == 0 && worst <= 1e-8 && min_mu >= 1.0,
        format!("50 instances, {failures} failed paths, max eigenvalue error {worst:.1e}, min μ_eig {min_mu:.3}"),
    )
}

fn main() {
    let strict = std::env::var_os("ACCEPTANCE_STRICT").is_some();
    let mut passed = 0;
    let mut total = 0;
    let mut run = |c: Criterion, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        total += 1;
        if report(&c, &o, t.elapsed()) {
            passed += 1;
        }
    };
    let crit = |id, name, budget| Criterion { id, name, budget };

    run(crit("1", "univariate E[Σμ²] = d(d+1)", secs(120)), &univariate_mu2);
    run(crit("2", "Shub–Smale pair has μ = √n", secs(1)), &shsm_minimal);
    run(crit("3", "BC zeros satisfy μ ≤ 2(n+1)^d", secs(5)), &bc_bound);
    run(crit("4", "uniform sphere energy", secs(30)), &fekete_uniform);
    run(crit("5", "random polynomial zero energy", secs(120)), &fekete_random_poly);
    run(crit("6", "minimized energy window", secs(300)), &fekete_window);

    let t = Instant::now();
    let camp = tracking_campaign();
    let elapsed = t.elapsed();
    let c7 = report(
        &crit("7", "tracking success and Bézout completeness", secs(600)),
        &outcome(
            camp.succeeded as f64 >= 0.99 * camp.paths as f64 && camp.bad_endpoints == 0 && camp.collisions == 0,
            format!(
                "{} paths succeeded ({}), {} uncertified or high-residual endpoints, {} targets with coinciding endpoints",
                camp.per_case.join(", "),
                camp.succeeded,
                camp.bad_endpoints,
                camp.collisions
            ),
        ),
        elapsed,
    );
    let c8 = report(
        &crit("8", "condition-length lower bound", secs(600)),
        &outcome(
            camp.lb_violations == 0,
            format!(
                "{} violations over {} successful paths; max steps/(d^1.5 L/λ0) = {:.2}",
                camp.lb_violations, camp.lb_checked, camp.worst_step_ratio
            ),
        ),
        elapsed,
    );
    total += 2;
    passed += c7 as usize + c8 as usize;

    let mut run = |c: Criterion, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        total += 1;
        if report(&c, &o, t.elapsed()) {
            passed += 1;
        }
    };
    run(crit("9", "μ-theorem quadratic convergence", secs(300)), &probe_theorem);
    run(crit("10", "BP sampler statistics", secs(120)), &bp_statistics);
    run(crit("11", "Eckart–Young distance", secs(1)), &eckart_young);
    run(crit("12", "round-off δ soundness", secs(120)), &roundoff_soundness);
    run(crit("13", "eigenpair continuation", secs(30)), &eigenpath_oracle);

    println!("acceptance: {passed}/{total} criteria passed");
    if strict && passed < total {
        std::process::exit(1);
    }
}
