//! Homotopy paths `t ↦ h_t` of the form `a(t)·P + b(t)·Q`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ONE};
use crate::polyspace::{Form, PolySystem, ProjectivePoint};

/// Below this, `‖h' − <h',g> g‖` is treated as zero and the endpoints as projectively equal.
pub const PARALLEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    GreatCircle,
    Segment,
    EvalPoint,
}

/// A curve of systems. Great circles are `cos t·g + sin t·q` with `g ⊥ q`
/// unit vectors; segments are `P + t·Q` for `t ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct PathSpec {
    pub kind: PathKind,
    pub t_end: f64,
    p: PolySystem,
    q: PolySystem,
    // Gram entries <P,P>, <P,Q>, <Q,Q>
    pp: f64,
    pq: Complex64,
    qq: f64,
}

/// `h_t(z)`, `Dh_t(z)` and `ḣ_t(z)` at one point, plus norms of the path.
#[derive(Debug, Clone)]
pub struct LocalEval {
    pub val: Vec<Complex64>,
    pub jac: CMat,
    pub dval: Vec<Complex64>,
    pub hnorm: f64,
}

impl PathSpec {
    fn new(kind: PathKind, t_end: f64, p: PolySystem, q: PolySystem) -> Self {
        let pp = p.bw_norm().powi(2);
        let qq = q.bw_norm().powi(2);
        let pq = p.bw_inner(&q).expect("same degrees");
        PathSpec {
            kind,
            t_end,
            p,
            q,
            pp,
            pq,
            qq,
        }
    }

    pub fn degrees(&self) -> &[u32] {
        self.p.degrees().as_slice()
    }

    pub fn n(&self) -> usize {
        self.p.n()
    }

    /// Same curve, parametrized up to a different end time.
    pub fn with_t_end(&self, t_end: f64) -> PathSpec {
        PathSpec {
            t_end,
            ..self.clone()
        }
    }

    fn coeffs(&self, t: f64) -> (f64, f64, f64, f64) {
        match self.kind {
            PathKind::GreatCircle => (t.cos(), t.sin(), -t.sin(), t.cos()),
            PathKind::Segment | PathKind::EvalPoint => (1.0, t, 0.0, 1.0),
        }
    }

    /// The system `h_t`, assembled coefficientwise.
    pub fn system_at(&self, t: f64) -> PolySystem {
        let (a, b, _, _) = self.coeffs(t);
        self.p
            .combine(Complex64::new(a, 0.0), &self.q, Complex64::new(b, 0.0))
            .expect("same degrees")
    }

    /// `ḣ_t`, assembled coefficientwise.
    pub fn velocity_at(&self, t: f64) -> PolySystem {
        let (_, _, da, db) = self.coeffs(t);
        self.p
            .combine(Complex64::new(da, 0.0), &self.q, Complex64::new(db, 0.0))
            .expect("same degrees")
    }

    /// `‖h_t‖`.
    pub fn norm_at(&self, t: f64) -> f64 {
        let (a, b, _, _) = self.coeffs(t);
        (a * a * self.pp + 2.0 * a * b * self.pq.re + b * b * self.qq).max(0.0).sqrt()
    }

    /// Speed of `t ↦ [h_t]` in projective space:
    /// `‖ḣ − (<ḣ,h>/‖h‖²) h‖ / ‖h‖`. Equals 1 on a great circle.
    pub fn speed(&self, t: f64) -> f64 {
        let (a, b, da, db) = self.coeffs(t);
        let x = self.pq.re;
        let hh = a * a * self.pp + 2.0 * a * b * x + b * b * self.qq;
        if hh <= 0.0 {
            return 0.0;
        }
        let dd = da * da * self.pp + 2.0 * da * db * x + db * db * self.qq;
        let dh = Complex64::new(
            da * a * self.pp + (da * b + db * a) * x + db * b * self.qq,
            self.pq.im * (da * b - db * a),
        );
        let perp2 = dd - dh.norm_sqr() / hh;
        perp2.max(0.0).sqrt() / hh.sqrt()
    }

    /// Evaluate `h_t`, `Dh_t` and `ḣ_t` at `z`.
    pub fn local(&self, t: f64, z: &[Complex64]) -> LocalEval {
        let (a, b, da, db) = self.coeffs(t);
        let (pv, pj) = self.p.eval_with_jacobian(z);
        let (qv, qj) = self.q.eval_with_jacobian(z);
        let val = pv.iter().zip(&qv).map(|(x, y)| x * a + y * b).collect();
        let dval = pv.iter().zip(&qv).map(|(x, y)| x * da + y * db).collect();
        let jac = pj * Complex64::new(a, 0.0) + qj * Complex64::new(b, 0.0);
        LocalEval {
            val,
            jac,
            dval,
            hnorm: self.norm_at(t),
        }
    }
}

/// The arc of great circle from `g/‖g‖` to `h/‖h‖`, with `h` rotated by a
/// phase so that `<h', g>` is real and nonnegative; `t_end = arccos |<g,h>|`.
/// Projectively equal endpoints give a path with `t_end = 0`.
pub fn great_circle(g: &PolySystem, h: &PolySystem) -> Result<PathSpec> {
    if g.degrees() != h.degrees() {
        return Err(Error::Shape("start and target have different degree lists".into()));
    }
    if g.is_zero() || h.is_zero() {
        return Err(Error::DegeneratePath("zero system on a great circle".into()));
    }
    let g = g.normalized();
    let h = h.normalized();
    let c = h.bw_inner(&g)?;
    let phase = if c.norm() > 0.0 { c.conj() / c.norm() } else { ONE };
    let h = h.scaled(phase);
    let cos = c.norm().min(1.0);
    let resid = h.combine(ONE, &g, Complex64::new(-cos, 0.0))?;
    let rn = resid.bw_norm();
    if rn <= PARALLEL_TOL {
        let zero = PolySystem::zeros(g.degrees());
        return Ok(PathSpec::new(PathKind::GreatCircle, 0.0, g, zero));
    }
    let q = resid.scaled(Complex64::new(1.0 / rn, 0.0));
    Ok(PathSpec::new(PathKind::GreatCircle, rn.atan2(cos), g, q))
}

/// The straight segment `(1 − t) g + t h`, `t ∈ [0, 1]`.
pub fn segment(g: &PolySystem, h: &PolySystem) -> Result<PathSpec> {
    let q = h.combine(ONE, g, Complex64::new(-1.0, 0.0))?;
    Ok(PathSpec::new(PathKind::Segment, 1.0, g.clone(), q))
}

/// `ĥ_ζ(z) = Diag(<z,ζ>^{d_i}/<ζ,ζ>^{d_i}) h(ζ)`.
pub fn eval_point_system(h: &PolySystem, zeta: &ProjectivePoint) -> PolySystem {
    let x = zeta.rep();
    let val = h.evaluate(x);
    let zz = linalg::inner(x, x).re;
    let conj: Vec<Complex64> = x.iter().map(|c| c.conj()).collect();
    let lz = Form::linear(&conj);
    let polys = h
        .polys()
        .iter()
        .zip(&val)
        .map(|(f, v)| {
            let d = f.degree();
            let mut k = lz.pow(d);
            k.scale(v / zz.powi(d as i32));
            k
        })
        .collect();
    PolySystem::from_forms(polys).expect("same shape as h")
}

/// `h_t = h − (1 − t) ĥ_ζ` for `t ∈ [0, 1]`; `ζ` is a zero of `h_0`.
pub fn eval_point_homotopy(h: &PolySystem, zeta: &ProjectivePoint) -> Result<PathSpec> {
    if h.is_zero() {
        return Err(Error::DegeneratePath("zero target system".into()));
    }
    let hat = eval_point_system(h, zeta);
    let g = h.combine(ONE, &hat, Complex64::new(-1.0, 0.0))?;
    Ok(PathSpec::new(PathKind::EvalPoint, 1.0, g, hat))
}
