//! JSON interchange for systems and points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DegreeList, MultiIndex, PolySystem, ProjectivePoint};
use crate::error::{Error, Result};
use crate::linalg::ZERO;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub alpha: MultiIndex,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub n: usize,
    pub degrees: Vec<u32>,
    pub polys: Vec<Vec<TermJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&PolySystem> for SystemJson {
    fn from(h: &PolySystem) -> Self {
        let polys = h
            .polys()
            .iter()
            .map(|f| {
                f.basis
                    .exps
                    .iter()
                    .zip(&f.coeffs)
                    .filter(|(_, c)| **c != ZERO)
                    .map(|(a, c)| TermJson {
                        alpha: a.clone(),
                        re: c.re,
                        im: c.im,
                    })
                    .collect()
            })
            .collect();
        SystemJson {
            n: h.n(),
            degrees: h.degrees().as_slice().to_vec(),
            polys,
        }
    }
}

impl TryFrom<&SystemJson> for PolySystem {
    type Error = Error;

    fn try_from(s: &SystemJson) -> Result<Self> {
        let degrees = DegreeList::new(s.degrees.clone())?;
        if s.n != degrees.n() {
            return Err(Error::Shape(format!("n = {} but {} degrees given", s.n, degrees.n())));
        }
        let terms: Vec<Vec<(MultiIndex, Complex64)>> = s
            .polys
            .iter()
            .map(|p| p.iter().map(|t| (t.alpha.clone(), Complex64::new(t.re, t.im))).collect())
            .collect();
        PolySystem::from_terms(&degrees, &terms)
    }
}

impl From<&ProjectivePoint> for PointJson {
    fn from(p: &ProjectivePoint) -> Self {
        PointJson {
            re: p.rep().iter().map(|c| c.re).collect(),
            im: p.rep().iter().map(|c| c.im).collect(),
        }
    }
}

impl PointJson {
    pub fn from_slice(z: &[Complex64]) -> Self {
        PointJson {
            re: z.iter().map(|c| c.re).collect(),
            im: z.iter().map(|c| c.im).collect(),
        }
    }

    pub fn to_complex(&self) -> Result<Vec<Complex64>> {
        if self.re.len() != self.im.len() {
            return Err(Error::Shape("re and im parts differ in length".into()));
        }
        Ok(self.re.iter().zip(&self.im).map(|(&a, &b)| Complex64::new(a, b)).collect())
    }
}

impl PolySystem {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&SystemJson::from(self)).expect("system serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: SystemJson = serde_json::from_str(text)?;
        PolySystem::try_from(&s)
    }
}
