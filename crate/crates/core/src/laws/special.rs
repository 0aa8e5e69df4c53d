//! Special functions and elementary distribution functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `sqrt(2/π)`, the mean of `|N|`.
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `E|N|^p = 2^{p/2} Γ((p+1)/2) / √π`.
pub fn abs_normal_moment(p: f64) -> f64 {
    (0.5 * p * std::f64::consts::LN_2 + ln_gamma(0.5 * (p + 1.0)) - 0.5 * PI.ln()).exp()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// CDF of `scale · |N|`.
pub fn half_normal_cdf(x: f64, scale: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        erf(x / scale * FRAC_1_SQRT_2)
    }
}

pub fn maxwell_pdf(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        SQRT_2_OVER_PI * r * r * (-0.5 * r * r).exp()
    }
}

pub fn maxwell_cdf(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        erf(r * FRAC_1_SQRT_2) - SQRT_2_OVER_PI * r * (-0.5 * r * r).exp()
    }
}

pub fn exponential_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-x).exp_m1()
    }
}

pub fn uniform_cdf(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// CDF of `½(1/U − 1)` for `U` uniform: `P(X ≤ x) = 1 − 1/(1 + 2x)`.
pub fn inverse_uniform_gap_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        2.0 * x / (1.0 + 2.0 * x)
    }
}

/// CDF of the product of two independent uniforms: `t − t ln t`.
pub fn uniform_product_cdf(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t - t * t.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((ln_gamma(171.5) - gamma(171.5).ln()).abs() < 1e-9 || gamma(171.5).is_infinite());
        assert!((ln_gamma(1.5) - (0.5 * PI.sqrt()).ln()).abs() < 1e-15);
    }

    #[test]
    fn half_normal_mean_constant() {
        assert!((SQRT_2_OVER_PI - (2.0 / PI).sqrt()).abs() < 1e-16);
        assert!((abs_normal_moment(1.0) - SQRT_2_OVER_PI).abs() < 1e-15);
        assert!((abs_normal_moment(2.0) - 1.0).abs() < 1e-14);
        assert!((abs_normal_moment(4.0) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn cdf_limits() {
        assert!((maxwell_cdf(40.0) - 1.0).abs() < 1e-15);
        assert_eq!(maxwell_cdf(0.0), 0.0);
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((half_normal_cdf(1.0, 1.0) - 0.682_689_492_137_085_9).abs() < 1e-15);
        assert!((uniform_product_cdf(1.0) - 1.0).abs() < 1e-16);
        assert!((inverse_uniform_gap_cdf(0.5) - 0.5).abs() < 1e-16);
    }
}
