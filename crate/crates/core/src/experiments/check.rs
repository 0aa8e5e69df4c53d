use serde::{Deserialize, Serialize};

use crate::laws::special::erfc;
use crate::stats::{IndependenceReport, KsReport, MomentReport, THREE_SIGMA_LEVEL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Self::Pass
    }
}

/// One named comparison inside a report.
///
/// `level` is the probability that the check fails when the identity it
/// tests is true: the KS level, the three-sigma tail, or 0 for quadrature
/// and pathwise checks that have no sampling noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub level: f64,
    pub verdict: Verdict,
}

impl Check {
    /// KS test: passes when the p-value exceeds the level in `tolerance`.
    pub fn ks(id: impl Into<String>, r: &KsReport) -> Self {
        Self {
            id: id.into(),
            statistic: r.d,
            target: None,
            tolerance: r.threshold,
            p_value: Some(r.p_value),
            level: r.threshold,
            verdict: Verdict::from_bool(r.passes()),
        }
    }

    /// Rank-product KS and Spearman checks of one pair.
    pub fn independence(id: &str, r: &IndependenceReport) -> [Self; 2] {
        let spearman = Self {
            id: format!("{id}_spearman"),
            statistic: r.spearman,
            target: Some(0.0),
            tolerance: r.ks.threshold,
            p_value: Some(r.spearman_p),
            level: r.ks.threshold,
            verdict: Verdict::from_bool(r.spearman_p > r.ks.threshold),
        };
        [Self::ks(format!("{id}_rank_product"), &r.ks), spearman]
    }

    /// `|estimate - target| < 3 SE`.
    pub fn z(id: impl Into<String>, m: &MomentReport) -> Self {
        let target = m.target.expect("z check needs a target");
        let z = m.z_score.unwrap_or(f64::INFINITY);
        Self {
            id: id.into(),
            statistic: m.estimate,
            target: Some(target),
            tolerance: 3.0 * m.std_error,
            p_value: Some(erfc(z.abs() / std::f64::consts::SQRT_2)),
            level: THREE_SIGMA_LEVEL,
            verdict: Verdict::from_bool(m.within(3.0)),
        }
    }

    /// Noise-free comparison `|value - target| <= tol`.
    pub fn exact(id: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self {
            id: id.into(),
            statistic: value,
            target: Some(target),
            tolerance: tol,
            p_value: None,
            level: 0.0,
            verdict: Verdict::from_bool((value - target).abs() <= tol),
        }
    }

    /// Noise-free upper bound `value < bound`.
    pub fn below(id: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            id: id.into(),
            statistic: value,
            target: None,
            tolerance: bound,
            p_value: None,
            level: 0.0,
            verdict: Verdict::from_bool(value < bound),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn is_statistical(&self) -> bool {
        self.level > 0.0
    }
}
