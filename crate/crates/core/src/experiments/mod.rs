//! Monte Carlo and optimization harness: `E[Σμ²]`, `ℬ₁`, and logarithmic
//! energies of points on the Riemann sphere.

mod fekete;
mod mu2;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

pub use fekete::{
    fekete_energy, mc_energy_random_poly, mc_energy_uniform, minimize_energy, projective_to_sphere, random_poly_energy_target,
    shsm_energy_bound_check, sphere_to_plane, uniform_energy_target, zeros_to_sphere, EnergyBoundReport, Minimized,
    SphereConfiguration, SPHERE_TOL,
};
pub use mu2::{estimate_b1, mc_bp_mu_squared, mc_sum_mu_squared, mu2_general_formula, mu2_univariate_display};

/// Batches used for median-of-means wherever the integrand is `μ²`.
pub const MOM_BATCHES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum McMethod {
    Mean,
    MedianOfMeans { k: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub estimate: f64,
    pub stderr: f64,
    /// Samples that entered the estimate.
    pub samples: usize,
    pub method: McMethod,
    pub target: Option<f64>,
    /// Samples discarded (failed root finding, singular paths, ...).
    pub rejected: usize,
    /// Named side quantities reported alongside the estimate.
    pub extra: BTreeMap<String, f64>,
    /// Per-sample values in trial order.
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl McReport {
    pub fn rejection_rate(&self) -> f64 {
        let total = self.samples + self.rejected;
        if total == 0 {
            0.0
        } else {
            self.rejected as f64 / total as f64
        }
    }

    /// `|estimate − target| ≤ rel·|target|`; false without a target.
    pub fn within_rel(&self, rel: f64) -> bool {
        self.target.is_some_and(|t| (self.estimate - t).abs() <= rel * t.abs())
    }

    /// `|estimate − target| ≤ k·stderr`; false without a target.
    pub fn within_stderr(&self, k: f64) -> bool {
        self.target.is_some_and(|t| (self.estimate - t).abs() <= k * self.stderr)
    }

    /// Per-sample values as a one-column CSV.
    pub fn values_csv(&self) -> String {
        let mut out = String::from("sample,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{i},{v}\n"));
        }
        out
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = if xs.len() > 1 {
        xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (m, v)
}

/// Plain sample mean with `stderr = s/√n`.
pub fn mean_report(values: &[f64], target: Option<f64>, rejected: usize) -> McReport {
    let (m, v) = if values.is_empty() { (f64::NAN, f64::NAN) } else { mean_var(values) };
    McReport {
        estimate: m,
        stderr: (v / values.len() as f64).sqrt(),
        samples: values.len(),
        method: McMethod::Mean,
        target,
        rejected,
        extra: BTreeMap::new(),
        values: values.to_vec(),
    }
}

/// Median of `k` contiguous batch means; `stderr` is the standard deviation
/// of the batch means over `√k`.
pub fn median_of_means(values: &[f64], k: usize, target: Option<f64>, rejected: usize) -> McReport {
    let k = k.clamp(1, values.len().max(1));
    let n = values.len();
    let mut means: Vec<f64> = (0..k)
        .map(|b| {
            let lo = b * n / k;
            let hi = (b + 1) * n / k;
            let s = &values[lo..hi];
            s.iter().sum::<f64>() / s.len().max(1) as f64
        })
        .collect();
    let (_, v) = if n == 0 { (f64::NAN, f64::NAN) } else { mean_var(&means) };
    means.sort_by(f64::total_cmp);
    let med = if means.is_empty() || n == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        means[k / 2]
    } else {
        0.5 * (means[k / 2 - 1] + means[k / 2])
    };
    McReport {
        estimate: med,
        stderr: (v / k as f64).sqrt(),
        samples: n,
        method: McMethod::MedianOfMeans { k },
        target,
        rejected,
        extra: BTreeMap::new(),
        values: values.to_vec(),
    }
}

/// Evaluate `f` on trial indices `0..samples` in parallel; results come back
/// in index order so downstream reductions do not depend on scheduling.
pub(crate) fn trials<T: Send>(samples: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..samples as u64).into_par_iter().map(f).collect()
}
