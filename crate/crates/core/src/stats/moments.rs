use serde::{Deserialize, Serialize};

use super::{EmpiricalSample, StatsError};

/// Streaming mean and variance (Welford), mergeable across batches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        self.mean += d * w;
        self.m2 += other.m2 + d * d * self.n as f64 * w;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 below two observations.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }

    pub fn report(&self, order: f64, target: Option<f64>) -> MomentReport {
        MomentReport::new(order, self.mean(), self.std_error(), target)
    }
}

impl FromIterator<f64> for MomentAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub order: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub target: Option<f64>,
    pub z_score: Option<f64>,
}

impl MomentReport {
    pub fn new(order: f64, estimate: f64, std_error: f64, target: Option<f64>) -> Self {
        let z_score = target.map(|t| {
            let diff = estimate - t;
            if std_error > 0.0 {
                diff / std_error
            } else if diff == 0.0 {
                0.0
            } else {
                diff.signum() * f64::INFINITY
            }
        });
        Self {
            order,
            estimate,
            std_error,
            target,
            z_score,
        }
    }

    /// `|z| < k`; false when there is no target.
    pub fn within(&self, k: f64) -> bool {
        self.z_score.is_some_and(|z| z.abs() < k)
    }
}

fn power(v: f64, order: f64, signed: bool) -> f64 {
    let is_int = order.fract() == 0.0 && order.abs() < 64.0;
    match (signed, is_int) {
        (true, true) => v.powi(order as i32),
        (true, false) => v.signum() * v.abs().powf(order),
        (false, true) => v.abs().powi(order as i32),
        (false, false) => v.abs().powf(order),
    }
}

/// Mean of `|v|^order`, or of the signed power when `signed` is set.
pub fn moment_report_values(
    values: &[f64],
    order: f64,
    target: Option<f64>,
    signed: bool,
) -> Result<MomentReport, StatsError> {
    if !(order >= 0.0) {
        return Err(StatsError::Invalid(format!("order must be >= 0, got {order}")));
    }
    if values.is_empty() {
        return Err(StatsError::Undersized { n: 0, min: 1 });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let acc: MomentAccumulator = values.iter().map(|&v| power(v, order, signed)).collect();
    Ok(acc.report(order, target))
}

pub fn moment_report(
    a: &EmpiricalSample,
    order: f64,
    target: Option<f64>,
    signed: bool,
) -> Result<MomentReport, StatsError> {
    moment_report_values(a.values(), order, target, signed)
}

/// Frequency of an event as a mean of indicators.
pub fn proportion_report(hits: usize, n: usize, target: Option<f64>) -> Result<MomentReport, StatsError> {
    if n < 2 || hits > n {
        return Err(StatsError::Invalid(format!("bad proportion {hits}/{n}")));
    }
    let p = hits as f64 / n as f64;
    let se = (p * (1.0 - p) / (n - 1) as f64).sqrt();
    Ok(MomentReport::new(0.0, p, se, target))
}
