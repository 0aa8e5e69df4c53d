use serde::{Deserialize, Serialize};

use crate::pathkit::{TripletKind, TripletSample};
use crate::rng::RandomStream;

/// Exactly samplable laws. The tag fixes the arity of a draw.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    /// `(½B₁, L₁, Λ)`
    Thm1Rhs,
    /// `(ΛL₁ − ½|B₁|, L₁, Λ)`
    Cor1HittingRhs,
    /// `(ΛL₁ + ½|B₁|, L₁, Λ)`
    Cor1BesselRhs,
    /// `(½(1/U − 1), Λ, R₁)`
    Cor2Rhs,
    /// `(E, E')`
    LemmaExpPair,
    /// `(|B_s|, L_s)`
    FixedTimeFactorization { s: f64 },
    /// `1/√T₁`
    #[serde(rename = "exact_T1")]
    ExactT1,
    /// `(1/√T₁, B_{UT₁})`
    #[serde(rename = "exact_joint_descB")]
    ExactJointDescB,
}

impl ReferenceKind {
    pub fn arity(&self) -> usize {
        match self {
            Self::Thm1Rhs | Self::Cor1HittingRhs | Self::Cor1BesselRhs | Self::Cor2Rhs => 3,
            Self::LemmaExpPair | Self::FixedTimeFactorization { .. } | Self::ExactJointDescB => 2,
            Self::ExactT1 => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReferenceDraw {
    Scalar(f64),
    Pair(f64, f64),
    Triplet(TripletSample),
}

impl ReferenceDraw {
    pub fn coords(&self) -> Vec<f64> {
        match *self {
            Self::Scalar(a) => vec![a],
            Self::Pair(a, b) => vec![a, b],
            Self::Triplet(t) => t.coords().to_vec(),
        }
    }

    pub fn triplet(&self) -> Option<TripletSample> {
        match *self {
            Self::Triplet(t) => Some(t),
            _ => None,
        }
    }

    pub fn pair(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn scalar(&self) -> Option<f64> {
        match *self {
            Self::Scalar(a) => Some(a),
            _ => None,
        }
    }
}

/// `(B₁, L₁)` from one Maxwell variable, one uniform and a fair sign.
fn b1_l1(stream: &mut RandomStream) -> (f64, f64) {
    let r = stream.maxwell();
    let u = stream.uniform();
    let sign = stream.sign();
    (sign * r * (1.0 - u), r * u)
}

/// One exact draw of the law named by `kind`. A fixed-time factorization
/// with `s <= 0` yields NaN coordinates.
pub fn sample_reference(kind: ReferenceKind, stream: &mut RandomStream) -> ReferenceDraw {
    let tag = TripletKind::Reference(kind);
    match kind {
        ReferenceKind::Thm1Rhs => {
            let (b, l) = b1_l1(stream);
            let lam = stream.uniform();
            ReferenceDraw::Triplet(TripletSample::new(0.5 * b, l, lam, tag))
        }
        ReferenceKind::Cor1HittingRhs | ReferenceKind::Cor1BesselRhs => {
            let (b, l) = b1_l1(stream);
            let lam = stream.uniform();
            let half = if kind == ReferenceKind::Cor1HittingRhs {
                -0.5 * b.abs()
            } else {
                0.5 * b.abs()
            };
            ReferenceDraw::Triplet(TripletSample::new(lam * l + half, l, lam, tag))
        }
        ReferenceKind::Cor2Rhs => {
            let u = stream.open_uniform();
            let lam = stream.uniform();
            let r = stream.maxwell();
            ReferenceDraw::Triplet(TripletSample::new(0.5 * (1.0 / u - 1.0), lam, r, tag))
        }
        ReferenceKind::LemmaExpPair => {
            let e1 = stream.exponential();
            let e2 = stream.exponential();
            ReferenceDraw::Pair(e1, e2)
        }
        ReferenceKind::FixedTimeFactorization { s } => {
            let root = if s > 0.0 { s.sqrt() } else { f64::NAN };
            let r = stream.maxwell() * root;
            let u = stream.uniform();
            ReferenceDraw::Pair(r * (1.0 - u), r * u)
        }
        ReferenceKind::ExactT1 => ReferenceDraw::Scalar(stream.gaussian().abs()),
        ReferenceKind::ExactJointDescB => {
            let r = stream.maxwell();
            let u = stream.open_uniform();
            let lam = stream.uniform();
            ReferenceDraw::Pair(r * u, lam - 0.5 * (1.0 / u - 1.0))
        }
    }
}
