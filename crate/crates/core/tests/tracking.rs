mod common;

use common::{aberth_roots, c};
use num_complex::Complex64;
use polyhom::eigenpath::companion_roots;
use polyhom::polyspace::{affine_zero_of, proj_distance, DegreeList, PolySystem, ProjectivePoint};
use polyhom::rng::{complex_gaussian, stream, Domain};
use polyhom::startsys::{bc_pair, shsm_pair};
use polyhom::tracker::{condition_length_lower_bound, great_circle, segment, track, TrackerConfig};

fn univariate(coeffs: &[Complex64]) -> PolySystem {
    let d = coeffs.len() as u32 - 1;
    let terms = vec![coeffs
        .iter()
        .enumerate()
        .map(|(k, &a)| (vec![d - k as u32, k as u32], a))
        .collect()];
    PolySystem::from_terms(&DegreeList::new(vec![d]).unwrap(), &terms).unwrap()
}

fn pp(z: Complex64) -> ProjectivePoint {
    ProjectivePoint::from_affine(&[z])
}

fn all_paths_distinct(endpoints: &[ProjectivePoint], sep: f64) -> bool {
    endpoints
        .iter()
        .enumerate()
        .all(|(i, a)| endpoints[i + 1..].iter().all(|b| proj_distance(a, b) > sep))
}

#[test]
fn cubic_roots_agree_across_tracker_companion_and_aberth() {
    let deg = DegreeList::new(vec![3]).unwrap();
    let bc = bc_pair(&deg).unwrap();
    let cfg = TrackerConfig::default();
    for i in 0..50 {
        let mut r = stream(11, Domain::Target, i);
        let coeffs: Vec<Complex64> = (0..4).map(|_| complex_gaussian(&mut r)).collect();
        let h = univariate(&coeffs);
        let path = great_circle(&bc.g, &h).unwrap();
        let tracked: Vec<ProjectivePoint> = bc
            .zeros
            .iter()
            .map(|z| {
                let res = track(&path, z, &cfg);
                assert!(res.is_success(), "instance {i}: {:?}", res.status);
                res.endpoint
            })
            .collect();
        assert!(all_paths_distinct(&tracked, 1e-6), "instance {i}");
        let companion: Vec<ProjectivePoint> = companion_roots(&coeffs).unwrap().into_iter().map(pp).collect();
        let oracle: Vec<ProjectivePoint> = aberth_roots(&coeffs).into_iter().map(pp).collect();
        for o in &oracle {
            let near = |set: &[ProjectivePoint]| set.iter().map(|p| proj_distance(p, o)).fold(f64::INFINITY, f64::min);
            assert!(near(&tracked) < 1e-8, "instance {i}: tracker {}", near(&tracked));
            assert!(near(&companion) < 1e-8, "instance {i}: companion {}", near(&companion));
        }
    }
}

#[test]
fn two_quadrics_reach_all_four_zeros() {
    let deg = DegreeList::new(vec![2, 2]).unwrap();
    let bc = bc_pair(&deg).unwrap();
    let cfg = TrackerConfig::default();
    for i in 0..5 {
        let mut r = stream(12, Domain::Target, i);
        let h = PolySystem::sample_sphere(&deg, &mut r);
        let path = great_circle(&bc.g, &h).unwrap();
        let results: Vec<_> = bc.zeros.iter().map(|z| track(&path, z, &cfg)).collect();
        for res in &results {
            assert!(res.is_success());
            assert!(res.certificate.certified);
            assert!(res.residual <= 1e-10);
            assert!(res.l_kappa_estimate >= condition_length_lower_bound(2, 2, res.mu_start, res.mu_end));
        }
        let ends: Vec<ProjectivePoint> = results.into_iter().map(|r| r.endpoint).collect();
        assert!(all_paths_distinct(&ends, 1e-8));
    }
}

#[test]
fn known_quadratic_roots() {
    let h = univariate(&[c(-2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    let bc = bc_pair(h.degrees()).unwrap();
    let path = great_circle(&bc.g, &h).unwrap();
    let mut roots: Vec<f64> = bc
        .zeros
        .iter()
        .map(|z| affine_zero_of(&track(&path, z, &TrackerConfig::default()).endpoint).unwrap()[0].re)
        .collect();
    roots.sort_by(f64::total_cmp);
    assert!((roots[0] + 2f64.sqrt()).abs() < 1e-12);
    assert!((roots[1] - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn linear_targets_need_at_most_two_steps() {
    for n in 1..=4 {
        let deg = DegreeList::uniform(n, 1).unwrap();
        let start = shsm_pair(&deg);
        for i in 0..5 {
            let mut r = stream(13, Domain::Target, (n * 10 + i) as u64);
            let h = PolySystem::sample_sphere(&deg, &mut r);
            for path in [great_circle(&start.g, &h).unwrap(), segment(&start.g, &h).unwrap()] {
                let res = track(&path, &start.zeros[0], &TrackerConfig::default());
                assert!(res.is_success());
                assert!(res.steps <= 2, "n={n}: {} steps", res.steps);
            }
        }
    }
}

#[test]
fn segment_and_great_circle_agree_on_endpoints() {
    let deg = DegreeList::new(vec![2, 3]).unwrap();
    let bc = bc_pair(&deg).unwrap();
    let mut r = stream(14, Domain::Target, 0);
    let h = PolySystem::sample_sphere(&deg, &mut r);
    let cfg = TrackerConfig::default();
    let gc = great_circle(&bc.g, &h).unwrap();
    let seg = segment(&bc.g, &h).unwrap();
    let a: Vec<_> = bc.zeros.iter().map(|z| track(&gc, z, &cfg)).collect();
    let b: Vec<_> = bc.zeros.iter().map(|z| track(&seg, z, &cfg)).collect();
    assert!(a.iter().chain(&b).all(|r| r.is_success()));
    for x in &a {
        let best = b.iter().map(|y| proj_distance(&x.endpoint, &y.endpoint)).fold(f64::INFINITY, f64::min);
        assert!(best < 1e-10, "{best}");
    }
}
