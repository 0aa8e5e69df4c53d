use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::formulas::{
    a_c_density, a_c_positive_mass, alpha_c_pdf, alpha_pdf, k_density, l_density, r_gamma_pdf,
    u_density, z_c_density,
};
use super::quadrature::{integrate, QuadratureConfig};
use super::LawError;

type PdfFn = dyn Fn(f64) -> Result<f64, LawError> + Send + Sync;

/// A closed-form law: pointwise density plus a CDF by adaptive quadrature.
#[derive(Clone)]
pub struct AnalyticDensity {
    name: String,
    support: (f64, f64),
    pdf: Arc<PdfFn>,
    quad: QuadratureConfig,
}

impl fmt::Debug for AnalyticDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticDensity")
            .field("name", &self.name)
            .field("support", &self.support)
            .field("quad", &self.quad)
            .finish()
    }
}

impl AnalyticDensity {
    pub fn new(
        name: impl Into<String>,
        support: (f64, f64),
        quad: QuadratureConfig,
        pdf: impl Fn(f64) -> Result<f64, LawError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            support,
            pdf: Arc::new(pdf),
            quad,
        }
    }

    fn infallible(
        name: &str,
        support: (f64, f64),
        splits: &[f64],
        pdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(
            name,
            support,
            QuadratureConfig::default().with_splits(splits),
            move |x| Ok(pdf(x)),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn quadrature(&self) -> &QuadratureConfig {
        &self.quad
    }

    /// Points where the density is singular, kinked or discontinuous.
    pub fn singular_points(&self) -> &[f64] {
        &self.quad.singularity_splits
    }

    pub fn pdf(&self, x: f64) -> Result<f64, LawError> {
        if x < self.support.0 || x > self.support.1 {
            return Ok(0.0);
        }
        (self.pdf)(x)
    }

    /// `∫_{lo}^{hi} g(x) pdf(x) dx` over the intersection with the support.
    pub fn integrate_weighted(
        &self,
        g: impl Fn(f64) -> f64,
        lo: f64,
        hi: f64,
    ) -> Result<f64, LawError> {
        let (a, b) = (lo.max(self.support.0), hi.min(self.support.1));
        if a >= b {
            return Ok(0.0);
        }
        let failure = std::sync::Mutex::new(None);
        let f = |x: f64| match (self.pdf)(x) {
            Ok(v) if v.is_finite() => g(x) * v,
            Ok(_) => 0.0,
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                0.0
            }
        };
        let r = integrate(f, a, b, &self.quad)?;
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        Ok(r.value)
    }

    pub fn mass(&self) -> Result<f64, LawError> {
        self.integrate_weighted(|_| 1.0, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn cdf(&self, x: f64) -> Result<f64, LawError> {
        if x <= self.support.0 {
            return Ok(0.0);
        }
        Ok(self
            .integrate_weighted(|_| 1.0, f64::NEG_INFINITY, x)?
            .clamp(0.0, 1.0))
    }

    /// Tabulates the CDF on `[lo, hi]` with about `cells` equal cells.
    /// Evaluation outside the range falls back to direct quadrature.
    pub fn tabulate(&self, lo: f64, hi: f64, cells: usize) -> Result<TabulatedCdf, LawError> {
        if cells < 1 {
            return Err(LawError::Domain("tabulation needs at least one cell".into()));
        }
        let nodes = (0..=cells)
            .map(|i| lo + (hi - lo) * i as f64 / cells as f64)
            .collect();
        self.tabulate_at(nodes)
    }

    /// Tabulates the CDF on the given nodes (clipped to the support). The
    /// singular points inside the range are added as nodes, with geometric
    /// refinement towards them so the cells interpolated linearly are tiny.
    pub fn tabulate_at(&self, mut nodes: Vec<f64>) -> Result<TabulatedCdf, LawError> {
        nodes.retain(|x| x.is_finite());
        for x in nodes.iter_mut() {
            *x = x.clamp(self.support.0, self.support.1);
        }
        nodes.sort_by(f64::total_cmp);
        let (lo, hi) = match (nodes.first(), nodes.last()) {
            (Some(&lo), Some(&hi)) if lo < hi => (lo, hi),
            _ => return Err(LawError::Domain("tabulation needs a non-empty range".into())),
        };
        let splits: Vec<f64> = self
            .singular_points()
            .iter()
            .copied()
            .filter(|&s| s > lo && s < hi)
            .collect();
        for &s in &splits {
            nodes.push(s);
            for k in 1..=14 {
                let d = 10f64.powi(-k) * (1.0 + s.abs());
                nodes.extend([s - d, s + d].into_iter().filter(|&x| x > lo && x < hi));
            }
        }
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));

        let base = self.cdf(lo)?;
        let cell_cfg = QuadratureConfig {
            singularity_splits: Vec::new(),
            ..self.quad.clone()
        };
        let pieces: Vec<Result<f64, LawError>> = nodes
            .par_windows(2)
            .map(|w| {
                let failure = std::sync::Mutex::new(None);
                let f = |x: f64| match (self.pdf)(x) {
                    Ok(v) if v.is_finite() => v,
                    Ok(_) => 0.0,
                    Err(e) => {
                        failure.lock().unwrap().get_or_insert(e);
                        0.0
                    }
                };
                let r = integrate(f, w[0], w[1], &cell_cfg)?.value;
                match failure.into_inner().unwrap() {
                    Some(e) => Err(e),
                    None => Ok(r),
                }
            })
            .collect();
        let mut values = Vec::with_capacity(nodes.len());
        let mut acc = base;
        values.push(acc);
        for p in pieces {
            acc += p?;
            values.push(acc.min(1.0));
        }
        let slopes: Vec<f64> = nodes
            .iter()
            .map(|&x| {
                let on_split = splits.iter().any(|&s| (s - x).abs() <= 1e-14 * (1.0 + s.abs()));
                if on_split {
                    f64::NAN
                } else {
                    self.pdf(x).unwrap_or(f64::NAN)
                }
            })
            .collect();
        Ok(TabulatedCdf {
            nodes,
            values,
            slopes,
            density: self.clone(),
        })
    }
}

/// A CDF tabulated by cell-wise quadrature, evaluated by monotone cubic
/// Hermite interpolation (linear next to singular points).
#[derive(Clone, Debug)]
pub struct TabulatedCdf {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    density: AnalyticDensity,
}

impl TabulatedCdf {
    pub fn range(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    pub fn density(&self) -> &AnalyticDensity {
        &self.density
    }

    pub fn eval(&self, x: f64) -> Result<f64, LawError> {
        let n = self.nodes.len();
        if x < self.nodes[0] || x > self.nodes[n - 1] {
            return self.density.cdf(x);
        }
        let i = (self.nodes.partition_point(|&t| t <= x)).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let (f0, f1) = (self.values[i], self.values[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let v = if d0.is_finite() && d1.is_finite() {
            let t2 = t * t;
            let t3 = t2 * t;
            (2.0 * t3 - 3.0 * t2 + 1.0) * f0
                + (t3 - 2.0 * t2 + t) * h * d0
                + (-2.0 * t3 + 3.0 * t2) * f1
                + (t3 - t2) * h * d1
        } else {
            f0 + t * (f1 - f0)
        };
        Ok(v.clamp(f0.min(f1), f0.max(f1)))
    }

    /// Infallible evaluation for use inside hot loops; NaN on failure.
    pub fn cdf(&self, x: f64) -> f64 {
        self.eval(x).unwrap_or(f64::NAN)
    }
}

impl AnalyticDensity {
    /// Density of `A = ΛU − ½(1−U)`.
    pub fn u() -> Self {
        Self::infallible("u", (-0.5, 1.0), &[0.0], u_density)
    }

    /// Density of `B_{UT₁}`.
    pub fn k() -> Self {
        Self::infallible("k", (f64::NEG_INFINITY, 1.0), &[0.0], k_density)
    }

    /// Density of `A' = ΛU + ½(1−U)`.
    pub fn l() -> Self {
        Self::infallible("l", (0.0, 1.0), &[0.5], l_density)
    }

    /// Density of `α = B_{UT₁}/√T₁`.
    pub fn alpha() -> Self {
        let inner = QuadratureConfig::default().with_tolerances(1e-14, 1e-12);
        Self::new(
            "alpha",
            (f64::NEG_INFINITY, f64::INFINITY),
            QuadratureConfig::default()
                .with_tolerances(1e-11, 1e-11)
                .with_splits(&[0.0]),
            move |x| alpha_pdf(x, &inner),
        )
    }

    /// Density of `R_{Uγ}/√γ`.
    pub fn r_gamma() -> Self {
        let inner = QuadratureConfig::default().with_tolerances(1e-14, 1e-12);
        Self::new(
            "r_gamma",
            (0.0, f64::INFINITY),
            QuadratureConfig::default().with_tolerances(1e-11, 1e-11),
            move |x| r_gamma_pdf(x, &inner),
        )
    }

    /// Density of `Z_C`.
    pub fn z_c(c: f64) -> Self {
        Self::infallible(&format!("z_c({c})"), (0.0, 1.0), &[], move |z| z_c_density(z, c))
    }

    /// Density of `A_c = ΛU − c(1−U)`.
    pub fn a_c(c: f64) -> Self {
        Self::infallible(&format!("a_c({c})"), (-c, 1.0), &[0.0], move |x| a_c_density(x, c))
    }

    /// Density of `α_c = ΛL₁ − c|B₁|`.
    pub fn alpha_c(c: f64) -> Self {
        let inner = QuadratureConfig::default().with_tolerances(1e-14, 1e-12);
        Self::new(
            format!("alpha_c({c})"),
            (f64::NEG_INFINITY, f64::INFINITY),
            QuadratureConfig::default()
                .with_tolerances(1e-11, 1e-11)
                .with_splits(&[0.0]),
            move |x| alpha_c_pdf(x, c, &inner),
        )
    }

    /// Looks up a named density as exposed on the command line.
    pub fn by_name(name: &str, c: Option<f64>) -> Result<Self, LawError> {
        let need_c = || {
            c.ok_or_else(|| LawError::Domain(format!("density {name} needs a c parameter")))
                .and_then(check_c)
        };
        Ok(match name {
            "u" => Self::u(),
            "k" => Self::k(),
            "l" => Self::l(),
            "alpha" => Self::alpha(),
            "r_gamma" | "r-gamma" => Self::r_gamma(),
            "z" => Self::z_c(0.5),
            "z_c" | "z-c" => Self::z_c(need_c()?),
            "a_c" | "a-c" => Self::a_c(need_c()?),
            "alpha_c" | "alpha-c" => Self::alpha_c(need_c()?),
            _ => return Err(LawError::UnknownDensity(name.to_string())),
        })
    }

    pub const NAMES: [&'static str; 9] =
        ["u", "k", "l", "alpha", "r_gamma", "z", "z_c", "a_c", "alpha_c"];
}

fn check_c(c: f64) -> Result<f64, LawError> {
    if c > 0.0 && c <= 1.0 {
        Ok(c)
    } else {
        Err(LawError::Domain(format!("c must lie in (0, 1], got {c}")))
    }
}

/// The `A_c` / `α_c` family.
#[derive(Clone, Debug)]
pub struct AcFamily {
    pub c: f64,
    /// `P[A_c > 0] = P[α_c > 0]`.
    pub p_pos: f64,
    pub z_density: AnalyticDensity,
    /// `A_c`: `p_pos` times the law of `V Z_C` on `(0, 1)`, plus
    /// `1 − p_pos` times the law of `−cV` on `(−c, 0)`.
    pub a_density: AnalyticDensity,
    pub alpha_density: AnalyticDensity,
}

pub fn ac_family(c: f64) -> Result<AcFamily, LawError> {
    let c = check_c(c)?;
    let p_pos = a_c_positive_mass(c);
    let z_density = AnalyticDensity::z_c(c);
    // Assemble A_c from its two conditional pieces.
    let zd = z_density.clone();
    let inner = QuadratureConfig::default();
    let a_density = AnalyticDensity::new(
        format!("a_c({c})"),
        (-c, 1.0),
        QuadratureConfig::default().with_splits(&[0.0]),
        move |x| {
            if x > 0.0 && x < 1.0 {
                // density of V·Z_C at x: ∫_x^1 f_Z(z)/z dz
                let v = integrate(|z| zd.pdf(z).unwrap_or(0.0) / z, x, 1.0, &inner)?.value;
                Ok(p_pos * v)
            } else if (-c..=0.0).contains(&x) {
                Ok((1.0 - p_pos) / c)
            } else {
                Ok(0.0)
            }
        },
    );
    Ok(AcFamily {
        c,
        p_pos,
        z_density,
        a_density,
        alpha_density: AnalyticDensity::alpha_c(c),
    })
}
