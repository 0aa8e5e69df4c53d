//! Adaptive 21-point Gauss–Kronrod quadrature with global bisection.
//!
//! Infinite endpoints are mapped onto finite ones; interior points listed in
//! `singularity_splits` become panel boundaries so integrable logarithmic
//! singularities and kinks sit at an endpoint, where bisection converges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::LawError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub singularity_splits: Vec<f64>,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            singularity_splits: Vec::new(),
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_splits(mut self, splits: &[f64]) -> Self {
        self.singularity_splits = splits.to_vec();
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<(), LawError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(LawError::Domain("quadrature tolerances must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub evaluations: usize,
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600005728326,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994424288,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    res_asc *= half.abs();
    res_abs *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

fn adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
    budget: usize,
) -> Result<QuadResult, LawError> {
    let (v, e) = gk21(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;
    let mut evals = 21;
    let mut panels = 1;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if panels >= budget {
            return Err(LawError::Quadrature {
                achieved: total_err,
                requested: tol,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel too narrow to split further; keep it and stop refining.
            heap.push(worst);
            let tol_now = cfg.abs_tol.max(cfg.rel_tol * total.abs());
            if total_err <= 10.0 * tol_now {
                break;
            }
            return Err(LawError::Quadrature {
                achieved: total_err,
                requested: tol_now,
            });
        }
        let (v1, e1) = gk21(f, worst.a, mid);
        let (v2, e2) = gk21(f, mid, worst.b);
        evals += 42;
        panels += 1;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
        if panels % 64 == 0 {
            // Re-sum to shed cancellation drift in the running totals.
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let abs_err: f64 = heap.iter().map(|p| p.err).sum();
    Ok(QuadResult {
        value,
        abs_err,
        evaluations: evals,
    })
}

/// Integrates `f` over one finite or infinite interval, no splitting.
fn integrate_piece<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult, LawError> {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive(&mut |x| f(x), a, b, cfg, cfg.max_subdivisions),
        (true, false) => {
            // x = a + t/(1-t)
            let mut g = |t: f64| {
                let s = 1.0 - t;
                let v = f(a + t / s);
                if v == 0.0 {
                    0.0
                } else {
                    v / (s * s)
                }
            };
            adaptive(&mut g, 0.0, 1.0, cfg, cfg.max_subdivisions)
        }
        (false, true) => {
            // x = b - t/(1-t)
            let mut g = |t: f64| {
                let s = 1.0 - t;
                let v = f(b - t / s);
                if v == 0.0 {
                    0.0
                } else {
                    v / (s * s)
                }
            };
            adaptive(&mut g, 0.0, 1.0, cfg, cfg.max_subdivisions)
        }
        (false, false) => {
            let left = integrate_piece(f, f64::NEG_INFINITY, 0.0, cfg)?;
            let right = integrate_piece(f, 0.0, f64::INFINITY, cfg)?;
            Ok(QuadResult {
                value: left.value + right.value,
                abs_err: left.abs_err + right.abs_err,
                evaluations: left.evaluations + right.evaluations,
            })
        }
    }
}

/// `∫_a^b f`, split at every configured point strictly inside `(a, b)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult, LawError> {
    cfg.validate()?;
    if a.is_nan() || b.is_nan() {
        return Err(LawError::Domain("NaN integration bound".into()));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_err: 0.0, evaluations: 0 });
    }
    if a > b {
        let r = integrate(f, b, a, cfg)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    let mut cuts: Vec<f64> = cfg
        .singularity_splits
        .iter()
        .copied()
        .filter(|&s| s > a && s < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(a);
    bounds.extend(cuts);
    bounds.push(b);
    // Each piece gets the whole relative budget but a share of the absolute one.
    let pieces = (bounds.len() - 1) as f64;
    let piece_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol / pieces,
        ..cfg.clone()
    };
    let mut out = QuadResult { value: 0.0, abs_err: 0.0, evaluations: 0 };
    for w in bounds.windows(2) {
        let r = integrate_piece(&f, w[0], w[1], &piece_cfg)?;
        out.value += r.value;
        out.abs_err += r.abs_err;
        out.evaluations += r.evaluations;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, &cfg()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_over_the_line() {
        let r = integrate(
            |x| (-0.5 * x * x).exp(),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &cfg(),
        )
        .unwrap();
        assert!((r.value - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn endpoint_log_singularity() {
        // ∫_0^1 -ln x dx = 1
        let r = integrate(|x| -x.ln(), 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn interior_log_singularity_with_split() {
        // ∫_0^1 -ln|2x-1| dx = 1
        let c = cfg().with_splits(&[0.5]);
        let r = integrate(|x| -(2.0 * x - 1.0).abs().ln(), 0.0, 1.0, &c).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn algebraic_tail() {
        // ∫_1^∞ x^-2 dx = 1 and ∫_{-∞}^{-1} x^-2 dx = 1
        let r = integrate(|x| 1.0 / (x * x), 1.0, f64::INFINITY, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = integrate(|x| 1.0 / (x * x), f64::NEG_INFINITY, -1.0, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let r = integrate(|x| x, 1.0, 0.0, &cfg()).unwrap();
        assert!((r.value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_convergence_is_reported() {
        let c = QuadratureConfig {
            max_subdivisions: 3,
            ..cfg()
        };
        let e = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &c).unwrap_err();
        assert!(matches!(e, LawError::Quadrature { .. }));
    }
}
