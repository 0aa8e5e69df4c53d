use serde::{Deserialize, Serialize};

use super::path::{simulate_until_max_hits, DiscretePath, PathPoint};
use super::views::{levy_view, ReflectedView};
use super::{CompensatedSum, PathError, StepScheme};
use crate::laws::ReferenceKind;
use crate::rng::RandomStream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripletKind {
    PseudoBridge,
    Hitting,
    Bessel,
    Cor2Bridge,
    Cor2Hitting,
    Cor2Bessel,
    Reference(ReferenceKind),
}

/// One draw of a three-coordinate law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripletSample {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub kind: TripletKind,
}

impl TripletSample {
    pub fn new(x: f64, y: f64, z: f64, kind: TripletKind) -> Self {
        Self { x, y, z, kind }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Runs a path to the first time its maximum reaches 1 and reads it at
/// `U · T_1` for an independent uniform `U`.
fn uniform_time_point(
    stream: &mut RandomStream,
    scheme: &StepScheme,
) -> Result<(DiscretePath, f64, PathPoint), PathError> {
    let path = simulate_until_max_hits(stream, scheme, 1.0)?;
    let t_hit = path.end_time();
    let u = stream.uniform();
    let pt = path.sample_at(u * t_hit, stream);
    Ok((path, t_hit, pt))
}

/// `(B_{Uτ₁}/√τ₁, 1/√τ₁, L_{Uτ₁})` through the Lévy coupling.
pub fn sample_triplet_pseudo_bridge(
    stream: &mut RandomStream,
    scheme: &StepScheme,
) -> Result<TripletSample, PathError> {
    let (path, tau, pt) = uniform_time_point(stream, scheme)?;
    let view = levy_view(&path, stream);
    let sign = view.sign_at(&pt);
    let root = tau.sqrt();
    Ok(TripletSample::new(
        sign * (pt.m - pt.w) / root,
        1.0 / root,
        pt.m,
        TripletKind::PseudoBridge,
    ))
}

/// `(B_{UT₁}/√T₁, 1/√T₁, M_{UT₁})` read directly on the driving path.
pub fn sample_triplet_hitting(
    stream: &mut RandomStream,
    scheme: &StepScheme,
) -> Result<TripletSample, PathError> {
    let (_, t1, pt) = uniform_time_point(stream, scheme)?;
    let root = t1.sqrt();
    Ok(TripletSample::new(pt.w / root, 1.0 / root, pt.m, TripletKind::Hitting))
}

/// `(R_{Uγ}/√γ, 1/√γ, J_{Uγ})` through Pitman's map, with `γ = T₁`.
pub fn sample_triplet_bessel(
    stream: &mut RandomStream,
    scheme: &StepScheme,
) -> Result<TripletSample, PathError> {
    let (_, gamma, pt) = uniform_time_point(stream, scheme)?;
    let root = gamma.sqrt();
    let r = 2.0 * pt.m - pt.w;
    Ok(TripletSample::new(r / root, 1.0 / root, pt.m, TripletKind::Bessel))
}

/// Dispatches on a simulated triplet kind.
pub fn sample_triplet(
    kind: TripletKind,
    stream: &mut RandomStream,
    scheme: &StepScheme,
) -> Result<TripletSample, PathError> {
    match kind {
        TripletKind::PseudoBridge => sample_triplet_pseudo_bridge(stream, scheme),
        TripletKind::Hitting => sample_triplet_hitting(stream, scheme),
        TripletKind::Bessel => sample_triplet_bessel(stream, scheme),
        TripletKind::Cor2Bridge => sample_cor2(stream, scheme, Cor2Variant::Bridge),
        TripletKind::Cor2Hitting => sample_cor2(stream, scheme, Cor2Variant::Hitting),
        TripletKind::Cor2Bessel => sample_cor2(stream, scheme, Cor2Variant::Bessel),
        TripletKind::Reference(_) => Err(PathError::InvalidParameter(
            "reference kinds are drawn by laws::sample_reference".into(),
        )),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cor2Variant {
    Bridge,
    Hitting,
    Bessel,
}

/// The three triplets whose common law is that of independent
/// `(½(1/U − 1), Λ, R₁)`:
///
/// * bridge: `(|B_{Uτ₁}|, L_{Uτ₁}, (1 + 2|B_{Uτ₁}|)/√τ₁)`
/// * hitting: `(M − B, M, (1 + 2(M − B))/√T₁)` at `UT₁`
/// * bessel: `(R − J, J, (1 + 2(R − J))/√γ)` at `Uγ`
pub fn sample_cor2(
    stream: &mut RandomStream,
    scheme: &StepScheme,
    variant: Cor2Variant,
) -> Result<TripletSample, PathError> {
    let (_, t_end, pt) = uniform_time_point(stream, scheme)?;
    let root = t_end.sqrt();
    let (gap, level, kind) = match variant {
        Cor2Variant::Bridge => (pt.m - pt.w, pt.m, TripletKind::Cor2Bridge),
        Cor2Variant::Hitting => (pt.m - pt.w, pt.m, TripletKind::Cor2Hitting),
        Cor2Variant::Bessel => {
            let r = 2.0 * pt.m - pt.w;
            (r - pt.m, pt.m, TripletKind::Cor2Bessel)
        }
    };
    Ok(TripletSample::new(gap, level, (1.0 + 2.0 * gap) / root, kind))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HpVariant {
    /// `T₁^{-(p/2+1)} ∫₀^{T₁} ((p+1)/(2p²) − 1) M^p + B M^{p−1} ds`
    H,
    /// `τ₁^{-(p/2+1)} ∫₀^{τ₁} (p+1)/(2p²) L^p − |B| L^{p−1} ds`
    HPrime,
}

/// One draw of `H_p` or `H'_p`.
pub fn sample_functional_hp(
    stream: &mut RandomStream,
    scheme: &StepScheme,
    p: u32,
    variant: HpVariant,
) -> Result<f64, PathError> {
    Ok(sample_functional_hp_family(stream, scheme, &[p], variant)?[0])
}

/// `H_p` (or `H'_p`) for several powers on one path.
pub fn sample_functional_hp_family(
    stream: &mut RandomStream,
    scheme: &StepScheme,
    powers: &[u32],
    variant: HpVariant,
) -> Result<Vec<f64>, PathError> {
    if let Some(&p) = powers.iter().find(|&&p| p < 1) {
        return Err(PathError::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    let path = simulate_until_max_hits(stream, scheme, 1.0)?;
    Ok(powers.iter().map(|&p| hp_integral(&path, p, variant)).collect())
}

/// Trapezoid rule over the grid up to the last full step, then a partial
/// step to the hit where `B = M = 1`.
pub(crate) fn hp_integral(path: &DiscretePath, p: u32, variant: HpVariant) -> f64 {
    let hit = path.hit.expect("path must end at a hit");
    let pf = p as f64;
    let coef = (pf + 1.0) / (2.0 * pf * pf);
    let pi = p as i32;
    let last = hit.index - 1;

    let nodes: Box<dyn Fn(usize) -> f64> = match variant {
        HpVariant::H => Box::new(move |i| {
            let (w, m) = (path.w[i], path.m[i]);
            (coef - 1.0) * m.powi(pi) + w * m.powi(pi - 1)
        }),
        HpVariant::HPrime => {
            let view = ReflectedView::unsigned(path);
            Box::new(move |i| {
                let (a, l) = (view.abs_b[i], view.loc[i]);
                coef * l.powi(pi) - a * l.powi(pi - 1)
            })
        }
    };
    let end_value = match variant {
        HpVariant::H => (coef - 1.0) * hit.level.powi(pi) + hit.level * hit.level.powi(pi - 1),
        HpVariant::HPrime => coef * hit.level.powi(pi),
    };

    let mut acc = CompensatedSum::default();
    let mut prev = nodes(0);
    for i in 1..=last {
        let cur = nodes(i);
        acc.add(0.5 * (prev + cur) * (path.times[i] - path.times[i - 1]));
        prev = cur;
    }
    acc.add(0.5 * (prev + end_value) * (hit.t_hit - path.times[last]));
    acc.value() / hit.t_hit.powf(pf / 2.0 + 1.0)
}

/// `(τ_l, τ₁)` of the inverse local time, a stable-1/2 subordinator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorPair {
    pub tau_l: f64,
    pub tau_1: f64,
    pub l: f64,
}

/// Exact draw: `τ_l = l²/N²`, `τ₁ = τ_l + (1−l)²/N'²` with independent
/// Gaussians, so the Laplace exponent is `√(2λ)`.
pub fn sample_subordinator_pair(stream: &mut RandomStream, l: f64) -> Result<SubordinatorPair, PathError> {
    if !(l > 0.0 && l < 1.0) {
        return Err(PathError::InvalidParameter(format!("l must lie in (0, 1), got {l}")));
    }
    let stable = |stream: &mut RandomStream, scale: f64| loop {
        let n = stream.gaussian();
        if n != 0.0 {
            break scale * scale / (n * n);
        }
    };
    let tau_l = stable(stream, l);
    let tau_1 = tau_l + stable(stream, 1.0 - l);
    Ok(SubordinatorPair { tau_l, tau_1, l })
}
