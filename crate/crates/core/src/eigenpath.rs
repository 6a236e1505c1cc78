//! Eigenpair continuation along `A_t = (1 − t) A_0 + t A_1` and the
//! companion-matrix bridge to univariate root finding.

use nalgebra::Schur;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, ONE, ZERO};
use crate::tracker::{TrackStatus, TrackerConfig};

/// Largest accepted `‖δv‖ · μ_eig` for a single corrector step.
const MAX_CORRECTION: f64 = 0.1;

/// `(A, λ, v)` with `‖v‖ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenTriple {
    pub a: CMat,
    pub lambda: Complex64,
    pub v: CVec,
}

impl EigenTriple {
    /// `‖Av − λv‖`.
    pub fn residual(&self) -> f64 {
        (&self.a * &self.v - &self.v * self.lambda).norm()
    }
}

/// `max{1, ‖A‖_F ‖(π_{v^⊥}(λI − A)|_{v^⊥})^{-1}‖}`; infinite when the
/// restriction is singular.
pub fn mu_eig(a: &CMat, lambda: Complex64, v: &CVec) -> f64 {
    let n = a.nrows();
    if n <= 1 {
        return 1.0;
    }
    let b = linalg::orthogonal_complement(v.as_slice());
    let shifted = CMat::identity(n, n) * lambda - a;
    let m = b.adjoint() * shifted * &b;
    let s = linalg::singular_values(&m);
    let smin = s.last().copied().unwrap_or(0.0);
    let af = linalg::frobenius_norm(a);
    if !(smin > 1e-14 * af.max(f64::MIN_POSITIVE)) {
        return f64::INFINITY;
    }
    (af / smin).max(1.0)
}

/// Bordered Jacobian `[[A − λI, −v], [v*, 0]]`.
fn bordered(a: &CMat, lambda: Complex64, v: &CVec) -> CMat {
    let n = a.nrows();
    let mut j = CMat::zeros(n + 1, n + 1);
    j.view_mut((0, 0), (n, n)).copy_from(&(a - CMat::identity(n, n) * lambda));
    for i in 0..n {
        j[(i, n)] = -v[i];
        j[(n, i)] = v[i].conj();
    }
    j
}

/// One Newton step on `(Av − λv, v*v − 1)` with the border frozen at the
/// current `v`. Returns the corrected pair and `(‖δv‖, |δλ|)`.
fn eigen_newton(a: &CMat, lambda: Complex64, v: &CVec) -> Option<(Complex64, CVec, f64, f64)> {
    let n = a.nrows();
    let j = bordered(a, lambda, v);
    let r = a * v - v * lambda;
    let mut rhs = CVec::zeros(n + 1);
    for i in 0..n {
        rhs[i] = -r[i];
    }
    rhs[n] = ONE - v.dotc(v);
    let sol = linalg::solve(&j, &rhs, 1e-15)?;
    let dv = sol.rows(0, n).into_owned();
    let dl = sol[n];
    let nv = v + &dv;
    let norm = nv.norm();
    Some((lambda + dl, nv / Complex64::new(norm, 0.0), dv.norm(), dl.norm()))
}

/// `(v̇, λ̇)` along `A_t` with `Ȧ = A_1 − A_0`.
fn eigen_velocity(a: &CMat, adot: &CMat, lambda: Complex64, v: &CVec) -> Option<(CVec, Complex64)> {
    let n = a.nrows();
    let j = bordered(a, lambda, v);
    let av = adot * v;
    let mut rhs = CVec::zeros(n + 1);
    for i in 0..n {
        rhs[i] = -av[i];
    }
    let sol = linalg::solve(&j, &rhs, 1e-15)?;
    Some((sol.rows(0, n).into_owned(), sol[n]))
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenStep {
    pub t: f64,
    pub mu_eig: f64,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub struct EigenTrack {
    pub status: TrackStatus,
    pub end: EigenTriple,
    pub steps: usize,
    pub rejections: usize,
    pub log: Vec<EigenStep>,
    /// Trapezoid estimate of `∫ μ_eig ‖(Ȧ, λ̇, v̇)‖ dt`.
    pub length_estimate: f64,
    pub message: Option<String>,
}

fn interp(a0: &CMat, a1: &CMat, t: f64) -> CMat {
    a0 * Complex64::new(1.0 - t, 0.0) + a1 * Complex64::new(t, 0.0)
}

fn integrand(a: &CMat, adot: &CMat, lambda: Complex64, v: &CVec, mu: f64) -> f64 {
    let an = linalg::frobenius_norm(adot);
    match eigen_velocity(a, adot, lambda, v) {
        Some((vd, ld)) => mu * (an * an + ld.norm_sqr() + vd.norm_squared()).sqrt(),
        None => f64::INFINITY,
    }
}

/// Continue `start` (an eigenpair of `A_0`) to an eigenpair of `A_1`.
pub fn track_eigenpair(a0: &CMat, a1: &CMat, start: &EigenTriple, cfg: &TrackerConfig) -> Result<EigenTrack> {
    let n = a0.nrows();
    if a0.shape() != (n, n) || a1.shape() != (n, n) || start.v.len() != n {
        return Err(Error::Shape("eigenpath needs square matrices of one size".into()));
    }
    let adot = a1 - a0;
    let speed = linalg::frobenius_norm(&adot);
    let mut lambda = start.lambda;
    let mut v = &start.v / Complex64::new(start.v.norm(), 0.0);
    let mut log = Vec::new();
    let mut mu = mu_eig(a0, lambda, &v);
    log.push(EigenStep { t: 0.0, mu_eig: mu, dt: 0.0 });
    let finish = |status, lambda, v, steps, rejections, log, len, message| EigenTrack {
        status,
        end: EigenTriple {
            a: a1.clone(),
            lambda,
            v,
        },
        steps,
        rejections,
        log,
        length_estimate: len,
        message,
    };
    if speed == 0.0 {
        return Ok(finish(TrackStatus::Success, lambda, v, 0, 0, log, 0.0, None));
    }
    let mut t = 0.0;
    let mut steps = 0;
    let mut rejections = 0;
    let mut mult = 1.0f64;
    let mut len = 0.0;
    let mut f_cur = integrand(a0, &adot, lambda, &v, mu);
    while t < 1.0 {
        if !(mu <= cfg.mu_max) {
            let msg = format!("μ_eig = {mu:e} at t = {t}");
            return Ok(finish(TrackStatus::SingularEncounter, lambda, v, steps, rejections, log, len, Some(msg)));
        }
        if steps + rejections >= cfg.max_steps {
            return Ok(finish(TrackStatus::StepLimit, lambda, v, steps, rejections, log, len, None));
        }
        let dt = (mult * cfg.lambda0 / (mu * mu * speed)).min(1.0 - t);
        let t1 = if t + dt >= 1.0 { 1.0 } else { t + dt };
        if t1 <= t {
            let msg = format!("step size underflow at t = {t}");
            return Ok(finish(TrackStatus::SingularEncounter, lambda, v, steps, rejections, log, len, Some(msg)));
        }
        let a = interp(a0, a1, t1);
        let accepted = eigen_newton(&a, lambda, &v).and_then(|(l1, v1, dv, dl)| {
            let first = dv + dl / linalg::frobenius_norm(&a).max(f64::MIN_POSITIVE);
            let (_, _, dv2, dl2) = eigen_newton(&a, l1, &v1)?;
            let second = dv2 + dl2 / linalg::frobenius_norm(&a).max(f64::MIN_POSITIVE);
            let contracts = second <= first / 2.0 || first < 1e-13;
            (contracts && dv * mu <= MAX_CORRECTION).then_some((l1, v1))
        });
        match accepted {
            Some((l1, v1)) => {
                let mu1 = mu_eig(&a, l1, &v1);
                let f1 = integrand(&a, &adot, l1, &v1, mu1);
                len += 0.5 * (f_cur + f1) * (t1 - t);
                t = t1;
                lambda = l1;
                v = v1;
                mu = mu1;
                f_cur = f1;
                steps += 1;
                mult = (mult * cfg.grow).min(1.0);
                log.push(EigenStep { t, mu_eig: mu, dt });
            }
            None => {
                rejections += 1;
                mult *= cfg.shrink;
            }
        }
    }
    let a1n = linalg::frobenius_norm(a1);
    for _ in 0..cfg.refine_steps {
        match eigen_newton(a1, lambda, &v) {
            Some((l1, v1, dv, _)) => {
                lambda = l1;
                v = v1;
                if dv < 1e-15 {
                    break;
                }
            }
            None => break,
        }
    }
    let end = EigenTriple {
        a: a1.clone(),
        lambda,
        v: v.clone(),
    };
    let ok = end.residual() <= 1e-10 * a1n.max(f64::MIN_POSITIVE);
    let status = if ok { TrackStatus::Success } else { TrackStatus::Uncertified };
    let message = (!ok).then(|| format!("endpoint residual {:e}", end.residual()));
    Ok(finish(status, lambda, v, steps, rejections, log, len, message))
}

/// All eigenpairs of `a` from its complex Schur form `a = Q T Q*`: the
/// eigenvector for `T_ii` is `Q y` with `y` from back substitution on the
/// leading `i × i` block, then one bordered Newton polish.
pub fn eigenpairs(a: &CMat) -> Result<Vec<EigenTriple>> {
    let n = a.nrows();
    if a.shape() != (n, n) || n == 0 {
        return Err(Error::Shape("eigenpairs needs a nonempty square matrix".into()));
    }
    let schur = Schur::try_new(a.clone(), 1e-15, 10_000).ok_or_else(|| Error::IllPosed("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let floor = 1e-14 * linalg::frobenius_norm(a).max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = t[(i, i)];
        let mut y = CVec::zeros(n);
        y[i] = ONE;
        for k in (0..i).rev() {
            let mut s = ZERO;
            for j in k + 1..=i {
                s += t[(k, j)] * y[j];
            }
            let mut piv = t[(k, k)] - lambda;
            if piv.norm() < floor {
                piv = Complex64::new(floor, 0.0);
            }
            y[k] = -s / piv;
        }
        let v = &q * y;
        let mut v = &v / Complex64::new(v.norm(), 0.0);
        let mut lambda = lambda;
        if let Some((l1, v1, _, _)) = eigen_newton(a, lambda, &v) {
            if l1.is_finite() && v1.iter().all(|c| c.is_finite()) {
                lambda = l1;
                v = v1;
            }
        }
        out.push(EigenTriple { a: a.clone(), lambda, v });
    }
    Ok(out)
}

/// Track every eigenpair of `A_0` to `A_1`.
pub fn track_all_eigenpairs(a0: &CMat, a1: &CMat, cfg: &TrackerConfig) -> Result<Vec<EigenTrack>> {
    eigenpairs(a0)?.iter().map(|s| track_eigenpair(a0, a1, s, cfg)).collect()
}

/// Track every eigenpair of a diagonal `A_0` to `A_1`.
pub fn track_all_from_diagonal(a0: &CMat, a1: &CMat, cfg: &TrackerConfig) -> Result<Vec<EigenTrack>> {
    let n = a0.nrows();
    (0..n)
        .map(|i| {
            let mut v = CVec::zeros(n);
            v[i] = ONE;
            let start = EigenTriple {
                a: a0.clone(),
                lambda: a0[(i, i)],
                v,
            };
            track_eigenpair(a0, a1, &start, cfg)
        })
        .collect()
}

/// Companion matrix of `Σ_k a_k z^k` (ascending coefficients): ones on the
/// subdiagonal and `−a_0, …, −a_{d−1}` in the last column after dividing by
/// `a_d`. Also returns `a_d`.
pub fn companion_matrix(coeffs: &[Complex64]) -> Result<(CMat, Complex64)> {
    let lead = *coeffs
        .iter()
        .rev()
        .find(|c| **c != ZERO)
        .ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
    let d = coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(0);
    if d == 0 {
        return Err(Error::InvalidInput("constant polynomial has no companion matrix".into()));
    }
    let mut m = CMat::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..d {
        m[(i, d - 1)] = -coeffs[i] / lead;
    }
    Ok((m, lead))
}

/// Roots of `Σ_k a_k z^k` as eigenvalues of the companion matrix, each
/// polished by a few Newton steps on the polynomial.
pub fn companion_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let (m, _) = companion_matrix(coeffs)?;
    let d = m.nrows();
    let schur = Schur::try_new(m, 1e-15, 10_000).ok_or_else(|| Error::IllPosed("Schur iteration did not converge".into()))?;
    let (_, tri) = schur.unpack();
    let deg = coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(0);
    let p = &coeffs[..=deg];
    Ok((0..d).map(|i| polish_root(p, tri[(i, i)])).collect())
}

fn horner(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut f = ZERO;
    let mut df = ZERO;
    for &c in p.iter().rev() {
        df = df * z + f;
        f = f * z + c;
    }
    (f, df)
}

fn polish_root(p: &[Complex64], mut z: Complex64) -> Complex64 {
    for _ in 0..3 {
        let (f, df) = horner(p, z);
        if df == ZERO {
            break;
        }
        let step = f / df;
        if !step.is_finite() || step.norm() > 1e-3 * (1.0 + z.norm()) {
            break;
        }
        z -= step;
    }
    z
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(a: &CMat) -> Self {
        let n = a.nrows();
        MatrixJson {
            n,
            re: (0..n).map(|i| (0..a.ncols()).map(|j| a[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..a.ncols()).map(|j| a[(i, j)].im).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let n = self.n;
        let square = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !square(&self.re) || !square(&self.im) {
            return Err(Error::Shape(format!("matrix must be {n}×{n}")));
        }
        Ok(CMat::from_fn(n, n, |i, j| Complex64::new(self.re[i][j], self.im[i][j])))
    }
}
