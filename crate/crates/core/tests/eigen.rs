mod common;

use common::{aberth_roots, char_poly, match_distance};
use num_complex::Complex64;
use polyhom::eigenpath::{mu_eig, track_all_from_diagonal, EigenTriple};
use polyhom::linalg::{gaussian_matrix, CMat, CVec};
use polyhom::rng::{stream, Domain};
use polyhom::tracker::{TrackStatus, TrackerConfig};

fn roots_of_unity_diag(n: usize) -> CMat {
    let s = (n as f64).sqrt();
    CMat::from_diagonal(&CVec::from_fn(n, |k, _| {
        Complex64::from_polar(s, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
    }))
}

#[test]
fn diagonal_to_random_matches_char_poly() {
    let n = 4;
    let a0 = roots_of_unity_diag(n);
    let cfg = TrackerConfig::default();
    for i in 0..10 {
        let mut r = stream(41, Domain::Matrix, i);
        let a1 = gaussian_matrix(&mut r, n, n);
        let tracks = track_all_from_diagonal(&a0, &a1, &cfg).unwrap();
        assert!(tracks.iter().all(|t| t.status == TrackStatus::Success));
        assert!(tracks.iter().flat_map(|t| &t.log).all(|s| s.mu_eig >= 1.0));
        let got: Vec<Complex64> = tracks.iter().map(|t| t.end.lambda).collect();
        let oracle = aberth_roots(&char_poly(&a1));
        assert!(match_distance(&got, &oracle) < 1e-8, "instance {i}");
        for t in &tracks {
            assert!(t.end.residual() <= 1e-10 * a1.norm());
        }
    }
}

#[test]
fn mu_eig_is_invariant_under_unitary_similarity() {
    let mut r = stream(42, Domain::Matrix, 0);
    let a = gaussian_matrix(&mut r, 3, 3);
    let lambda = Complex64::new(0.3, -0.2);
    let v = CVec::from_column_slice(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
    let q = polyhom::linalg::random_unitary(&mut r, 3);
    let base = mu_eig(&a, lambda, &v);
    let moved = mu_eig(&(&q * &a * q.adjoint()), lambda, &(&q * &v));
    assert!((base - moved).abs() <= 1e-9 * base);
    assert!(base >= 1.0);
}

#[test]
fn eigen_triple_residual_of_exact_pair_is_zero() {
    let a = roots_of_unity_diag(3);
    let v = CVec::from_column_slice(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let t = EigenTriple {
        a: a.clone(),
        lambda: a[(1, 1)],
        v,
    };
    assert!(t.residual() < 1e-15);
}
