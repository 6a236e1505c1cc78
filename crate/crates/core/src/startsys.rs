//! Start systems with known zeros: the Shub–Smale pair, the roots-of-unity
//! pair, and the Beltrán–Pardo random pair.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ONE};
use crate::polyspace::{DegreeList, Form, PointJson, PolySystem, ProjectivePoint, SystemJson};
use crate::rng::{self, Domain};

/// Default cap on the number of enumerated roots-of-unity zeros.
pub const DEFAULT_ZERO_CAP: usize = 100_000;
/// `σ_min/σ_max` below which a sampled matrix is redrawn.
const BP_RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Shsm,
    Bc,
    Bp { seed: u64, index: u64, resamples: u32 },
}

/// A unit-norm system together with known zeros of it.
#[derive(Debug, Clone)]
pub struct StartPair {
    pub g: PolySystem,
    pub zeros: Vec<ProjectivePoint>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartPairJson {
    #[serde(flatten)]
    pub system: SystemJson,
    pub zeros: Vec<PointJson>,
    pub provenance: Provenance,
}

impl StartPair {
    pub fn to_json_value(&self) -> StartPairJson {
        StartPairJson {
            system: SystemJson::from(&self.g),
            zeros: self.zeros.iter().map(PointJson::from).collect(),
            provenance: self.provenance,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("start pair serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: StartPairJson = serde_json::from_str(text)?;
        let g = PolySystem::try_from(&s.system)?;
        let zeros = s
            .zeros
            .iter()
            .map(|p| {
                let v = p.to_complex()?;
                if v.len() != g.nvars() {
                    return Err(Error::Shape(format!("zero has {} coordinates, expected {}", v.len(), g.nvars())));
                }
                ProjectivePoint::new(v)
            })
            .collect::<Result<_>>()?;
        Ok(StartPair {
            g,
            zeros,
            provenance: s.provenance,
        })
    }
}

/// `g_i = √d_i x_0^{d_i−1} x_i`, scaled to unit norm, with zero `e_0`.
pub fn shsm_pair(degrees: &DegreeList) -> StartPair {
    let n = degrees.n();
    let polys = degrees
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let mut alpha = vec![0u32; n + 1];
            alpha[0] = d - 1;
            alpha[i + 1] += 1;
            Form::monomial(&alpha, Complex64::new((d as f64).sqrt(), 0.0))
        })
        .collect();
    let g = PolySystem::from_forms(polys).expect("well-formed").normalized();
    StartPair {
        g,
        zeros: vec![ProjectivePoint::e0(n)],
        provenance: Provenance::Shsm,
    }
}

/// `g_i = (x_0^{d_i} − x_i^{d_i})/√(2n)` with all `∏ d_i` zeros `(1, ω_1, …, ω_n)`.
pub fn bc_pair(degrees: &DegreeList) -> Result<StartPair> {
    bc_pair_capped(degrees, DEFAULT_ZERO_CAP)
}

pub fn bc_pair_capped(degrees: &DegreeList, cap: usize) -> Result<StartPair> {
    let count = degrees.bezout();
    if count > cap as u128 {
        return Err(Error::TooManyZeros { count, cap });
    }
    let n = degrees.n();
    let s = 1.0 / (2.0 * n as f64).sqrt();
    let polys = degrees
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let mut a0 = vec![0u32; n + 1];
            a0[0] = d;
            let mut ai = vec![0u32; n + 1];
            ai[i + 1] = d;
            let mut f = Form::monomial(&a0, Complex64::new(s, 0.0));
            f.add_scaled(ONE, &Form::monomial(&ai, Complex64::new(-s, 0.0)));
            f
        })
        .collect();
    let g = PolySystem::from_forms(polys).expect("well-formed");

    let mut zeros = Vec::with_capacity(count as usize);
    let mut idx = vec![0u32; n];
    loop {
        let mut v = Vec::with_capacity(n + 1);
        v.push(ONE);
        for (k, &d) in idx.iter().zip(degrees.as_slice()) {
            v.push(Complex64::from_polar(1.0, std::f64::consts::TAU * *k as f64 / d as f64));
        }
        zeros.push(ProjectivePoint::new(v)?);
        // odometer over (k_1, …, k_n), k_i < d_i
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(StartPair {
                    g,
                    zeros,
                    provenance: Provenance::Bc,
                });
            }
            idx[pos] += 1;
            if idx[pos] < degrees.as_slice()[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Beltrán–Pardo pair from the stream `(seed, StartPair, 0)`.
pub fn bp_sample(degrees: &DegreeList, seed: u64) -> StartPair {
    bp_sample_indexed(degrees, seed, 0)
}

/// Beltrán–Pardo pair number `index` under `seed`.
pub fn bp_sample_indexed(degrees: &DegreeList, seed: u64, index: u64) -> StartPair {
    let mut r = rng::stream(seed, Domain::StartPair, index);
    let draw = bp_draw(degrees, &mut r);
    let resamples = draw.resamples;
    StartPair {
        g: draw.g,
        zeros: vec![draw.zeta],
        provenance: Provenance::Bp { seed, index, resamples },
    }
}

/// One Beltrán–Pardo draw with the ingredients it was built from.
#[derive(Debug, Clone)]
pub struct BpDraw {
    /// Unit-norm system.
    pub g: PolySystem,
    pub zeta: ProjectivePoint,
    /// The `n × (n+1)` matrix whose kernel is `ζ`.
    pub m: CMat,
    /// `‖k + ℓ‖` before normalization.
    pub prenorm: f64,
    /// Number of rank-deficient matrices redrawn.
    pub resamples: u32,
}

/// Draws a pair `(g, ζ)`.
///
/// `M` is an `n × (n+1)` Gaussian matrix and `ζ` its unit kernel vector.
/// The system is `g = k + ℓ` with `ℓ_i(z) = √d_i <z,ζ>^{d_i−1} M_i z` and `k` a
/// Gaussian system projected onto the forms that vanish at `ζ` to second order
/// along `ζ^⊥`, then normalized.
pub fn bp_draw<R: Rng + ?Sized>(degrees: &DegreeList, r: &mut R) -> BpDraw {
    let n = degrees.n();
    let mut resamples = 0;
    let (m, zeta) = loop {
        let m = linalg::gaussian_matrix(r, n, n + 1);
        if let Some(zeta) = unit_kernel(&m) {
            break (m, zeta);
        }
        resamples += 1;
    };
    let zc: Vec<Complex64> = zeta.iter().map(|x| x.conj()).collect();
    let lz = Form::linear(&zc);
    // orthonormal basis of ζ^⊥ gives the linear forms <z, b_k>
    let perp = linalg::orthogonal_complement(&zeta);
    let perp_forms: Vec<Form> = (0..n)
        .map(|k| {
            let b: Vec<Complex64> = perp.column(k).iter().map(|x| x.conj()).collect();
            Form::linear(&b)
        })
        .collect();

    let mut k = PolySystem::sample_gaussian(degrees, r);
    for (i, f) in k.polys_mut().iter_mut().enumerate() {
        let d = degrees.as_slice()[i];
        let head = lz.pow(d - 1);
        let mut onb = vec![lz.pow(d)];
        for pf in &perp_forms {
            let mut e = head.mul(pf);
            e.scale(Complex64::new((d as f64).sqrt(), 0.0));
            onb.push(e);
        }
        for e in &onb {
            let c = f.bw_inner(e);
            f.add_scaled(-c, e);
        }
        let row: Vec<Complex64> = m.row(i).iter().copied().collect();
        let mut l = head.mul(&Form::linear(&row));
        l.scale(Complex64::new((d as f64).sqrt(), 0.0));
        f.add_scaled(ONE, &l);
    }
    let prenorm = k.bw_norm();
    BpDraw {
        g: k.normalized(),
        zeta: ProjectivePoint::new(zeta).expect("unit kernel vector"),
        m,
        prenorm,
        resamples,
    }
}

/// Unit vector spanning the kernel of a full-rank `n × (n+1)` matrix.
fn unit_kernel(m: &CMat) -> Option<Vec<Complex64>> {
    let (n, np1) = m.shape();
    let mut sq = CMat::zeros(np1, np1);
    sq.view_mut((0, 0), (n, np1)).copy_from(m);
    let dec = linalg::svd(&sq);
    if dec.s[n - 1] < BP_RANK_TOL * dec.s[0] {
        return None;
    }
    let v: Vec<Complex64> = dec.v.column(n).iter().copied().collect();
    let nv = linalg::norm(&v);
    Some(v.into_iter().map(|x| x / nv).collect())
}

/// Residual `‖g(ζ)‖` of a pair's zero.
pub fn residual(g: &PolySystem, zeta: &ProjectivePoint) -> f64 {
    linalg::norm(&g.evaluate(zeta.rep()))
}
