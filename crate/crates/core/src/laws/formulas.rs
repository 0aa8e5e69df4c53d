//! Closed-form densities and transforms.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use super::quadrature::{integrate, QuadratureConfig};
use super::special::{ln_gamma, SQRT_2_OVER_PI};
use super::LawError;

/// `E[|B₁|^a L₁^c] = Γ(1+a)Γ(1+c) / (2^{(a+c)/2} Γ(1+(a+c)/2))`.
pub fn mellin_abs_b1_l1(a: f64, c: f64) -> Result<f64, LawError> {
    if !(a >= 0.0 && c >= 0.0) || !a.is_finite() || !c.is_finite() {
        return Err(LawError::Domain(format!(
            "Mellin exponents must be finite and >= 0, got ({a}, {c})"
        )));
    }
    let s = 0.5 * (a + c);
    Ok((ln_gamma(1.0 + a) + ln_gamma(1.0 + c) - s * LN_2 - ln_gamma(1.0 + s)).exp())
}

/// `c_p = Γ(1+p) / (2^{p/2} Γ(1+p/2))`, which equals `E|N|^p`.
pub fn c_p(p: f64) -> Result<f64, LawError> {
    mellin_abs_b1_l1(p, 0.0)
}

/// Density of `(B_s, L_s)` at `(x, l)`.
pub fn joint_density_b_l(x: f64, l: f64, s: f64) -> Result<f64, LawError> {
    if l < 0.0 || l.is_nan() {
        return Err(LawError::Domain(format!("local time must be >= 0, got {l}")));
    }
    if !(s > 0.0) {
        return Err(LawError::Domain(format!("time must be > 0, got {s}")));
    }
    let a = x.abs() + l;
    Ok(a * (-a * a / (2.0 * s)).exp() / (2.0 * PI * s * s * s).sqrt())
}

/// Density of `A = ΛU − ½(1−U)`.
pub fn u_density(x: f64) -> f64 {
    if (-0.5..=0.0).contains(&x) {
        3f64.ln()
    } else if x > 0.0 && x <= 1.0 {
        (3.0 / (1.0 + 2.0 * x)).ln()
    } else {
        0.0
    }
}

/// Density `k` of `B_{UT₁}` on `(−∞, 1)`; zero at the boundary point 0.
pub fn k_density(x: f64) -> f64 {
    if x > 0.0 && x < 1.0 {
        2.0 * (1.0 - x) / (3.0 - 2.0 * x)
    } else if x < 0.0 {
        2.0 / ((1.0 - 2.0 * x) * (3.0 - 2.0 * x))
    } else {
        0.0
    }
}

/// Joint density `h(z, x)` of `(1/√T₁, B_{UT₁})`; zero for `x ∈ {0} ∪ [1, ∞)`.
pub fn h_density(z: f64, x: f64) -> Result<f64, LawError> {
    if !(z > 0.0) {
        return Err(LawError::Domain(format!("z must be > 0, got {z}")));
    }
    let z2 = z * z;
    let g = |a: f64| (-0.5 * a * a * z2).exp();
    Ok(if x > 0.0 && x < 1.0 {
        SQRT_2_OVER_PI * (g(1.0) - g(3.0 - 2.0 * x))
    } else if x < 0.0 {
        SQRT_2_OVER_PI * (g(1.0 - 2.0 * x) - g(3.0 - 2.0 * x))
    } else {
        0.0
    })
}

/// Density `l` of `A' = ΛU + ½(1−U)`; `+∞` at the singular point 1/2.
pub fn l_density(a: f64) -> f64 {
    if a == 0.5 {
        f64::INFINITY
    } else if a > 0.0 && a < 1.0 {
        -(2.0 * a - 1.0).abs().ln()
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Positive,
    Negative,
}

/// Analytic side of `E[(1/√T₁)^p φ(B_{UT₁}) 1{side}]`.
pub fn descb_weighted_integral(
    p: f64,
    phi: &dyn Fn(f64) -> f64,
    side: Side,
    cfg: &QuadratureConfig,
) -> Result<f64, LawError> {
    if !(p >= 0.0) {
        return Err(LawError::Domain(format!("p must be >= 0, got {p}")));
    }
    let cp = c_p(p)?;
    let q = p + 1.0;
    let r = match side {
        Side::Positive => integrate(|b| phi(b) * (1.0 - (3.0 - 2.0 * b).powf(-q)), 0.0, 1.0, cfg)?,
        Side::Negative => integrate(
            |x| phi(x) * ((1.0 - 2.0 * x).powf(-q) - (3.0 - 2.0 * x).powf(-q)),
            f64::NEG_INFINITY,
            0.0,
            cfg,
        )?,
    };
    Ok(cp * r.value)
}

/// `∫₀^∞ maxwell(r) (1/r) g(x/r) dr`: the density at `x` of `R₁ · Y` for
/// `Y` with density `g` supported on `[lo, hi]` (with `lo <= 0 < hi`) and
/// singular or kinked at `y_splits`.
pub(crate) fn maxwell_scale_mixture(
    x: f64,
    g: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    y_splits: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64, LawError> {
    // x/r must lie in [lo, hi]
    let r_min = if x > 0.0 {
        x / hi
    } else if x < 0.0 {
        if lo >= 0.0 {
            return Ok(0.0);
        }
        x / lo
    } else {
        0.0
    };
    let mut splits: Vec<f64> = y_splits
        .iter()
        .filter(|&&y| y != 0.0 && x != 0.0 && (x / y) > r_min && x / y > 0.0)
        .map(|&y| x / y)
        .collect();
    splits.sort_by(f64::total_cmp);
    let inner = QuadratureConfig {
        singularity_splits: splits,
        ..cfg.clone()
    };
    let f = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let v = g(x / r);
        if v == 0.0 {
            0.0
        } else {
            SQRT_2_OVER_PI * r * (-0.5 * r * r).exp() * v
        }
    };
    Ok(integrate(f, r_min, f64::INFINITY, &inner)?.value)
}

/// Density of `α = B_{UT₁}/√T₁ = R₁ A` as a Maxwell scale mixture of `u`.
pub fn alpha_pdf(x: f64, cfg: &QuadratureConfig) -> Result<f64, LawError> {
    maxwell_scale_mixture(x, &u_density, -0.5, 1.0, &[0.0], cfg)
}

/// Density of `R_{Uγ}/√γ`:
/// `√(2/π) x² ∫₁^∞ y exp(−x²y²/2) l(1/y) dy`, split where `l(1/y)` is
/// singular (`y = 2`).
pub fn r_gamma_pdf(x: f64, cfg: &QuadratureConfig) -> Result<f64, LawError> {
    if !(x > 0.0) {
        if x == 0.0 {
            return Ok(0.0);
        }
        return Err(LawError::Domain(format!("x must be > 0, got {x}")));
    }
    let x2 = x * x;
    let inner = QuadratureConfig {
        singularity_splits: vec![2.0],
        ..cfg.clone()
    };
    let f = |y: f64| {
        let e = (-0.5 * x2 * y * y).exp();
        if e == 0.0 {
            0.0
        } else {
            y * e * l_density(1.0 / y)
        }
    };
    Ok(SQRT_2_OVER_PI * x2 * integrate(f, 1.0, f64::INFINITY, &inner)?.value)
}

/// Density of `A_c = ΛU − c(1−U)`.
pub fn a_c_density(x: f64, c: f64) -> f64 {
    if x >= -c && x <= 0.0 {
        (1.0 + 1.0 / c).ln()
    } else if x > 0.0 && x < 1.0 {
        ((1.0 + c) / (x + c)).ln()
    } else {
        0.0
    }
}

/// `P[A_c > 0] = 1 − c log(1 + 1/c)`.
pub fn a_c_positive_mass(c: f64) -> f64 {
    1.0 - c * (1.0 + 1.0 / c).ln()
}

/// Density of `Z_C` on `(0, 1)`, `C = 1/c`.
pub fn z_c_density(z: f64, c: f64) -> f64 {
    if z > 0.0 && z < 1.0 {
        let big = 1.0 / c;
        big / a_c_positive_mass(c) * z / (1.0 + big * z)
    } else {
        0.0
    }
}

/// Density of `α_c = ΛL₁ − c|B₁| = R₁ A_c`.
pub fn alpha_c_pdf(x: f64, c: f64, cfg: &QuadratureConfig) -> Result<f64, LawError> {
    maxwell_scale_mixture(x, &|y| a_c_density(y, c), -c, 1.0, &[0.0, -c], cfg)
}
