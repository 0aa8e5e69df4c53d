use serde::{Deserialize, Serialize};

use super::StatsError;

/// Estimates of one statistic at decreasing step sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasLadder {
    pub dts: Vec<f64>,
    pub estimates: Vec<f64>,
    /// Monte Carlo standard errors per rung; zeros mean "exact".
    pub std_errors: Vec<f64>,
    pub extrapolated: Option<f64>,
}

impl BiasLadder {
    pub fn new(dts: Vec<f64>, estimates: Vec<f64>, std_errors: Vec<f64>) -> Result<Self, StatsError> {
        if dts.len() != estimates.len() || dts.len() != std_errors.len() {
            return Err(StatsError::DegenerateLadder("length mismatch".into()));
        }
        if dts.iter().any(|&d| !(d > 0.0)) {
            return Err(StatsError::DegenerateLadder("step sizes must be > 0".into()));
        }
        if dts.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(StatsError::DegenerateLadder("step sizes must strictly decrease".into()));
        }
        Ok(Self {
            dts,
            estimates,
            std_errors,
            extrapolated: None,
        })
    }

    /// Ladder of exact values.
    pub fn exact(dts: Vec<f64>, estimates: Vec<f64>) -> Result<Self, StatsError> {
        let n = dts.len();
        Self::new(dts, estimates, vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.dts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dts.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RichardsonFit {
    pub limit: f64,
    /// Standard error of `limit` propagated from the rung errors.
    pub limit_se: f64,
    pub coefficient: f64,
    /// Least-squares order, only with three or more rungs.
    pub fitted_order: Option<f64>,
}

struct Linear {
    limit: f64,
    limit_se: f64,
    coefficient: f64,
    ssr: f64,
}

fn weights(ladder: &BiasLadder) -> Vec<f64> {
    if ladder.std_errors.iter().all(|&s| s > 0.0) {
        ladder.std_errors.iter().map(|s| 1.0 / (s * s)).collect()
    } else {
        vec![1.0; ladder.len()]
    }
}

fn fit_linear(ladder: &BiasLadder, q: f64, w: &[f64]) -> Result<Linear, StatsError> {
    let xs: Vec<f64> = ladder.dts.iter().map(|d| d.powf(q)).collect();
    let (mut s0, mut s1, mut s2, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&x, &y), &wi) in xs.iter().zip(&ladder.estimates).zip(w) {
        s0 += wi;
        s1 += wi * x;
        s2 += wi * x * x;
        sy += wi * y;
        sxy += wi * x * y;
    }
    let det = s0 * s2 - s1 * s1;
    if !(det.abs() > 1e-300) || !(det.abs() > 1e-14 * s0 * s2) {
        return Err(StatsError::DegenerateLadder("singular design".into()));
    }
    let limit = (s2 * sy - s1 * sxy) / det;
    let coefficient = (s0 * sxy - s1 * sy) / det;
    let mut var = 0.0;
    let mut ssr = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let a = w[i] * (s2 - s1 * x) / det;
        var += a * a * ladder.std_errors[i] * ladder.std_errors[i];
        let r = ladder.estimates[i] - limit - coefficient * x;
        ssr += w[i] * r * r;
    }
    Ok(Linear {
        limit,
        limit_se: var.sqrt(),
        coefficient,
        ssr,
    })
}

/// Fits `estimate(dt) = limit + C dt^order_guess` by weighted least squares.
pub fn richardson_fit(ladder: &BiasLadder, order_guess: f64) -> Result<RichardsonFit, StatsError> {
    if ladder.len() < 2 {
        return Err(StatsError::DegenerateLadder("need at least two rungs".into()));
    }
    if !(order_guess > 0.0) {
        return Err(StatsError::Invalid(format!("order must be > 0, got {order_guess}")));
    }
    let w = weights(ladder);
    let lin = fit_linear(ladder, order_guess, &w)?;
    let fitted_order = if ladder.len() >= 3 { fit_order(ladder, &w) } else { None };
    Ok(RichardsonFit {
        limit: lin.limit,
        limit_se: lin.limit_se,
        coefficient: lin.coefficient,
        fitted_order,
    })
}

/// Golden-section search of the residual over the order in `[0.05, 4]`.
fn fit_order(ladder: &BiasLadder, w: &[f64]) -> Option<f64> {
    let ssr = |q: f64| fit_linear(ladder, q, w).map(|l| l.ssr).unwrap_or(f64::INFINITY);
    // coarse scan first, the residual need not be unimodal
    let grid: Vec<f64> = (0..=79).map(|i| 0.05 + 3.95 * i as f64 / 79.0).collect();
    let best = grid
        .iter()
        .copied()
        .min_by(|a, b| ssr(*a).total_cmp(&ssr(*b)))?;
    let step = 3.95 / 79.0;
    let (mut a, mut b) = ((best - step).max(0.05), (best + step).min(4.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..60 {
        if ssr(c) < ssr(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let q = 0.5 * (a + b);
    ssr(q).is_finite().then_some(q)
}

/// Extrapolated limit under `estimate(dt) = limit + C dt^order_guess`.
pub fn richardson(ladder: &BiasLadder, order_guess: f64) -> Result<f64, StatsError> {
    richardson_fit(ladder, order_guess).map(|f| f.limit)
}
