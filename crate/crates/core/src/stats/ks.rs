use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use super::{EmpiricalSample, StatsError, DEFAULT_LEVEL};
use crate::laws::special::{erfc, uniform_product_cdf};
use crate::laws::{AnalyticDensity, LawError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub d: f64,
    pub n_eff: f64,
    pub p_value: f64,
    pub threshold: f64,
}

impl KsReport {
    fn new(d: f64, n_eff: f64) -> Self {
        Self {
            d,
            n_eff,
            p_value: ks_p_value(d, n_eff),
            threshold: DEFAULT_LEVEL,
        }
    }

    pub fn with_threshold(mut self, level: f64) -> Self {
        self.threshold = level;
        self
    }

    pub fn passes(&self) -> bool {
        self.p_value > self.threshold
    }
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        // Jacobi-transformed series converges fast for small lambda.
        let mut s = 0.0;
        for k in 1..=20 {
            let j = (2 * k - 1) as f64;
            let term = (-j * j * PI * PI / (8.0 * lambda * lambda)).exp();
            s += term;
            if term < 1e-300 {
                break;
            }
        }
        return (1.0 - (2.0 * PI).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += sign * term;
        if term < 1e-300 {
            break;
        }
        sign = -sign;
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Asymptotic p-value with the small-sample correction of Stephens.
fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let r = n_eff.sqrt();
    kolmogorov_sf((r + 0.12 + 0.11 / r) * d)
}

pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> Result<KsReport, StatsError> {
    for s in [a, b] {
        if s.n() < 10 {
            return Err(StatsError::Undersized { n: s.n(), min: 10 });
        }
    }
    let (x, y) = (a.values(), b.values());
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(KsReport::new(d, n * m / (n + m)))
}

/// One-sample KS against a CDF that may fail.
pub fn ks_one_sample_fallible(
    a: &EmpiricalSample,
    mut cdf: impl FnMut(f64) -> Result<f64, LawError>,
) -> Result<KsReport, StatsError> {
    if a.is_empty() {
        return Err(StatsError::Undersized { n: 0, min: 1 });
    }
    let n = a.n() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in a.values().iter().enumerate() {
        let f = cdf(x)?;
        if !(0.0..=1.0).contains(&f) {
            return Err(StatsError::Invalid(format!("cdf({x}) = {f} outside [0, 1]")));
        }
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(KsReport::new(d, n))
}

pub fn ks_one_sample(a: &EmpiricalSample, cdf: impl Fn(f64) -> f64) -> Result<KsReport, StatsError> {
    ks_one_sample_fallible(a, |x| Ok(cdf(x)))
}

/// One-sample KS against a quadrature CDF, tabulated at sample quantiles.
pub fn ks_against_density(a: &EmpiricalSample, density: &AnalyticDensity) -> Result<KsReport, StatsError> {
    let v = a.values();
    let (lo, hi) = match (a.min(), a.max()) {
        (Some(lo), Some(hi)) if lo < hi => (lo, hi),
        _ => return ks_one_sample_fallible(a, |x| density.cdf(x)),
    };
    let cells = 4000.min(v.len());
    let mut nodes: Vec<f64> = (0..=cells).map(|i| v[i * (v.len() - 1) / cells]).collect();
    nodes.extend([lo, hi]);
    let table = density.tabulate_at(nodes)?;
    ks_one_sample_fallible(a, |x| table.eval(x))
}

/// Pairwise independence through ranks: the product of two independent
/// normalised ranks has CDF `t - t ln t`, tested by KS, plus Spearman's rho.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub ks: KsReport,
    pub spearman: f64,
    pub spearman_p: f64,
}

impl IndependenceReport {
    pub fn passes(&self) -> bool {
        self.ks.passes() && self.spearman_p > self.ks.threshold
    }
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]).then(i.cmp(&j)));
    let mut r = vec![0.0; v.len()];
    for (rank, &i) in idx.iter().enumerate() {
        r[i] = (rank + 1) as f64;
    }
    r
}

pub fn rank_independence(x: &[f64], y: &[f64]) -> Result<IndependenceReport, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::Invalid("paired samples differ in length".into()));
    }
    if x.len() < 10 {
        return Err(StatsError::Undersized { n: x.len(), min: 10 });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let scale = 1.0 / (n + 1.0);
    let prods: Vec<f64> = rx
        .iter()
        .zip(&ry)
        .map(|(a, b)| a * scale * b * scale)
        .collect();
    let ks = ks_one_sample(&EmpiricalSample::from_values(prods)?, uniform_product_cdf)?;
    let mean = 0.5 * (n + 1.0);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mean) * (b - mean)).sum();
    let var = n * (n * n - 1.0) / 12.0;
    let rho = cov / var;
    let z = rho * (n - 1.0).sqrt();
    Ok(IndependenceReport {
        ks,
        spearman: rho,
        spearman_p: erfc(z.abs() * FRAC_1_SQRT_2),
    })
}
