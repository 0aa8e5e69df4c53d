//! Named, reproducible verification recipes.
//!
//! Each recipe draws simulated samples from [`crate::pathkit`] and exact or
//! closed-form references from [`crate::laws`], and reduces every comparison
//! to a [`Check`]. A report passes when no noise-free check fails and the
//! number of failed statistical checks stays within the 99.9% quantile of
//! the failure count expected when every tested identity holds.

mod check;
mod context;
mod joint;
mod scalar;

pub use check::{Check, Verdict};
pub use context::PATH_FAILURE_BUDGET;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laws::LawError;
use crate::pathkit::{PathError, StepScheme};
use crate::stats::{allowed_failures, StatsError};
use context::Ctx;

/// Quantile of the failure-count distribution used as the allowance.
pub const POLICY_QUANTILE: f64 = 0.999;

/// Smallest sample size accepted for statistical recipes.
pub const MIN_PATHS: usize = 10_000;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown experiment {0:?}")]
    UnknownName(String),
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentName {
    #[serde(rename = "verify_theorem1")]
    Theorem1,
    #[serde(rename = "verify_corollary1")]
    Corollary1,
    #[serde(rename = "verify_corollary2")]
    Corollary2,
    #[serde(rename = "verify_lemma_exp")]
    LemmaExp,
    #[serde(rename = "verify_mellin")]
    Mellin,
    #[serde(rename = "verify_alpha")]
    Alpha,
    #[serde(rename = "verify_descB")]
    DescB,
    #[serde(rename = "verify_centered")]
    Centered,
    #[serde(rename = "verify_bessel_ratio")]
    BesselRatio,
    #[serde(rename = "verify_appendixA")]
    AppendixA,
    #[serde(rename = "verify_appendixB")]
    AppendixB,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 11] = [
        Self::Theorem1,
        Self::Corollary1,
        Self::Corollary2,
        Self::LemmaExp,
        Self::Mellin,
        Self::Alpha,
        Self::DescB,
        Self::Centered,
        Self::BesselRatio,
        Self::AppendixA,
        Self::AppendixB,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Theorem1 => "verify_theorem1",
            Self::Corollary1 => "verify_corollary1",
            Self::Corollary2 => "verify_corollary2",
            Self::LemmaExp => "verify_lemma_exp",
            Self::Mellin => "verify_mellin",
            Self::Alpha => "verify_alpha",
            Self::DescB => "verify_descB",
            Self::Centered => "verify_centered",
            Self::BesselRatio => "verify_bessel_ratio",
            Self::AppendixA => "verify_appendixA",
            Self::AppendixB => "verify_appendixB",
        }
    }

    /// Stream families of recipe `k` start at `(k + 1) << 8`.
    fn family_base(&self) -> u32 {
        let k = Self::ALL.iter().position(|n| n == self).unwrap() as u32;
        (k + 1) << 8
    }

    /// Whether the recipe simulates paths (and so reads `paths` and `scheme`).
    pub fn simulates(&self) -> bool {
        !matches!(self, Self::Mellin)
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = ExperimentError;

    /// Accepts the catalog name with or without the `verify_` prefix,
    /// case-insensitively, with `-` for `_`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        let short = norm.strip_prefix("verify_").unwrap_or(&norm);
        Self::ALL
            .iter()
            .copied()
            .find(|n| n.as_str().to_ascii_lowercase()["verify_".len()..] == *short)
            .ok_or_else(|| ExperimentError::UnknownName(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Quick,
    Full,
}

impl Budget {
    pub fn paths(&self) -> usize {
        match self {
            Self::Quick => 20_000,
            Self::Full => 200_000,
        }
    }

    pub fn dt(&self) -> f64 {
        match self {
            Self::Quick => 1e-3,
            Self::Full => 1e-4,
        }
    }

    pub fn exact_draws(&self) -> usize {
        match self {
            Self::Quick => 100_000,
            Self::Full => 1_000_000,
        }
    }
}

impl FromStr for Budget {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "quick" => Ok(Self::Quick),
            "full" => Ok(Self::Full),
            _ => Err(ExperimentError::InvalidSpec(format!("unknown budget {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    /// Powers for the centered functionals.
    pub powers: Vec<u32>,
    /// Local-time levels `l` for the subordinator identity.
    pub levels: Vec<f64>,
    /// Laplace arguments `λ` for the subordinator identity.
    pub lambdas: Vec<f64>,
    /// Parameters `c` of the `A_c` family.
    pub c_grid: Vec<f64>,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            powers: vec![1, 2, 3],
            levels: vec![0.25, 0.5, 0.75],
            lambdas: vec![0.5, 1.0, 2.0],
            c_grid: vec![0.25, 0.5, 1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    /// Simulated paths per sample.
    pub paths: usize,
    /// Draws per exact-sampler sample.
    pub exact_draws: usize,
    pub scheme: StepScheme,
    pub master_seed: u64,
    pub options: ExperimentOptions,
}

impl ExperimentSpec {
    pub fn new(name: ExperimentName, budget: Budget, master_seed: u64) -> Self {
        Self {
            name,
            paths: budget.paths(),
            exact_draws: budget.exact_draws(),
            scheme: StepScheme::new(budget.dt()).expect("budget step is valid"),
            master_seed,
            options: ExperimentOptions::default(),
        }
    }

    pub fn with_paths(mut self, paths: usize) -> Self {
        self.paths = paths;
        self
    }

    pub fn with_exact_draws(mut self, n: usize) -> Self {
        self.exact_draws = n;
        self
    }

    pub fn with_scheme(mut self, scheme: StepScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::InvalidSpec(m));
        if self.name.simulates() && self.paths < MIN_PATHS {
            return bad(format!("paths must be >= {MIN_PATHS}, got {}", self.paths));
        }
        if self.exact_draws < MIN_PATHS {
            return bad(format!("exact_draws must be >= {MIN_PATHS}, got {}", self.exact_draws));
        }
        self.scheme.validate()?;
        let o = &self.options;
        if o.powers.is_empty() || o.powers.iter().any(|&p| p < 1) {
            return bad("powers must be >= 1".into());
        }
        if o.levels.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
            return bad("levels must lie in (0, 1)".into());
        }
        if o.lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return bad("lambdas must be > 0".into());
        }
        if o.c_grid.iter().any(|&c| !(c > 0.0 && c <= 1.0)) {
            return bad("c values must lie in (0, 1]".into());
        }
        Ok(())
    }
}

/// Failure counts under the multiple-testing policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyOutcome {
    pub statistical_checks: usize,
    pub statistical_failures: usize,
    pub allowed_failures: usize,
    pub exact_failures: usize,
    pub overall: bool,
}

pub fn apply_policy<'a>(checks: impl IntoIterator<Item = &'a Check>) -> PolicyOutcome {
    let mut levels = Vec::new();
    let (mut stat_fail, mut exact_fail) = (0, 0);
    for c in checks {
        if c.is_statistical() {
            levels.push(c.level);
            stat_fail += (!c.passed()) as usize;
        } else {
            exact_fail += (!c.passed()) as usize;
        }
    }
    let allowed = allowed_failures(&levels, POLICY_QUANTILE);
    PolicyOutcome {
        statistical_checks: levels.len(),
        statistical_failures: stat_fail,
        allowed_failures: allowed,
        exact_failures: exact_fail,
        overall: exact_fail == 0 && stat_fail <= allowed,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: ExperimentName,
    pub spec: ExperimentSpec,
    pub checks: Vec<Check>,
    pub policy: PolicyOutcome,
    pub overall: bool,
    pub path_failures: usize,
    pub seed: u64,
    pub version: String,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl ExperimentReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        with_header(self, self.wall_time_secs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub budget: Budget,
    pub seed: u64,
    pub reports: Vec<ExperimentReport>,
    pub policy: PolicyOutcome,
    pub overall: bool,
    pub version: String,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl SuiteReport {
    pub fn all_checks(&self) -> impl Iterator<Item = &Check> {
        self.reports.iter().flat_map(|r| r.checks.iter())
    }

    pub fn report(&self, name: ExperimentName) -> Option<&ExperimentReport> {
        self.reports.iter().find(|r| r.name == name)
    }

    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        with_header(self, self.wall_time_secs)
    }
}

/// `{"header": {...}, "body": ...}`; only the header varies between
/// identical runs.
fn with_header<T: Serialize>(body: &T, wall_time_secs: f64) -> String {
    let doc = serde_json::json!({
        "header": { "wall_time_secs": wall_time_secs, "version": VERSION },
        "body": body,
    });
    serde_json::to_string_pretty(&doc).expect("report serializes")
}

/// Runs one recipe on the current rayon pool.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport, ExperimentError> {
    spec.validate()?;
    let start = Instant::now();
    let mut ctx = Ctx::new(spec, spec.name.family_base());
    match spec.name {
        ExperimentName::Theorem1 => joint::theorem1(&mut ctx)?,
        ExperimentName::Corollary1 => joint::corollary1(&mut ctx)?,
        ExperimentName::Corollary2 => joint::corollary2(&mut ctx)?,
        ExperimentName::LemmaExp => joint::lemma_exp(&mut ctx)?,
        ExperimentName::DescB => joint::desc_b(&mut ctx)?,
        ExperimentName::Mellin => scalar::mellin(&mut ctx)?,
        ExperimentName::Alpha => scalar::alpha(&mut ctx)?,
        ExperimentName::Centered => scalar::centered(&mut ctx)?,
        ExperimentName::BesselRatio => scalar::bessel_ratio(&mut ctx)?,
        ExperimentName::AppendixA => scalar::appendix_a(&mut ctx)?,
        ExperimentName::AppendixB => scalar::appendix_b(&mut ctx)?,
    }
    let (checks, path_failures) = ctx.finish();
    let policy = apply_policy(&checks);
    for c in checks.iter().filter(|c| !c.passed()) {
        log::info!("{}: check {} failed ({:?})", spec.name, c.id, c);
    }
    Ok(ExperimentReport {
        name: spec.name,
        spec: spec.clone(),
        checks,
        overall: policy.overall,
        policy,
        path_failures,
        seed: spec.master_seed,
        version: VERSION.to_string(),
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, ExperimentError> {
    if workers == 0 {
        return Err(ExperimentError::InvalidSpec("workers must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))
}

/// Runs one recipe on a dedicated pool of `workers` threads. The report
/// body does not depend on `workers`.
pub fn run_with_workers(spec: &ExperimentSpec, workers: usize) -> Result<ExperimentReport, ExperimentError> {
    pool(workers)?.install(|| run(spec))
}

/// Runs the whole catalog at a budget and applies the policy to the union
/// of all checks.
pub fn run_all(master_seed: u64, budget: Budget) -> Result<SuiteReport, ExperimentError> {
    run_all_specs(master_seed, budget, |s| s)
}

/// As [`run_all`], letting the caller adjust each spec first.
pub fn run_all_specs(
    master_seed: u64,
    budget: Budget,
    adjust: impl Fn(ExperimentSpec) -> ExperimentSpec,
) -> Result<SuiteReport, ExperimentError> {
    let start = Instant::now();
    let reports = ExperimentName::ALL
        .iter()
        .map(|&n| run(&adjust(ExperimentSpec::new(n, budget, master_seed))))
        .collect::<Result<Vec<_>, _>>()?;
    let policy = apply_policy(reports.iter().flat_map(|r| r.checks.iter()));
    Ok(SuiteReport {
        name: "verify_all".into(),
        budget,
        seed: master_seed,
        overall: policy.overall,
        policy,
        reports,
        version: VERSION.to_string(),
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

pub fn run_all_with_workers(master_seed: u64, budget: Budget, workers: usize) -> Result<SuiteReport, ExperimentError> {
    pool(workers)?.install(|| run_all(master_seed, budget))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in ExperimentName::ALL {
            assert_eq!(n.as_str().parse::<ExperimentName>().unwrap(), n);
            let json = serde_json::to_string(&n).unwrap();
            assert_eq!(json, format!("\"{}\"", n.as_str()));
        }
        assert_eq!("theorem1".parse::<ExperimentName>().unwrap(), ExperimentName::Theorem1);
        assert_eq!("descb".parse::<ExperimentName>().unwrap(), ExperimentName::DescB);
        assert_eq!("bessel-ratio".parse::<ExperimentName>().unwrap(), ExperimentName::BesselRatio);
        assert!("theorem9".parse::<ExperimentName>().is_err());
    }

    #[test]
    fn spec_validation() {
        let s = ExperimentSpec::new(ExperimentName::Theorem1, Budget::Quick, 1);
        assert!(s.validate().is_ok());
        assert!(s.clone().with_paths(100).validate().is_err());
        let mut bad = s.clone();
        bad.options.c_grid = vec![1.5];
        assert!(bad.validate().is_err());
        // the Mellin recipe simulates nothing, so paths are not checked
        let m = ExperimentSpec::new(ExperimentName::Mellin, Budget::Quick, 1).with_paths(0);
        assert!(m.validate().is_ok());
    }

    #[test]
    fn policy_counts() {
        let pass = Check::exact("a", 1.0, 1.0, 0.0);
        let fail_exact = Check::exact("b", 1.0, 2.0, 0.1);
        let mut fail_stat = pass.clone();
        fail_stat.level = 0.001;
        fail_stat.verdict = Verdict::Fail;
        let checks = vec![pass.clone(), fail_stat.clone()];
        let out = apply_policy(&checks);
        // a single check at level 0.001 fails with probability 0.001 <= 0.999 quantile 0
        assert_eq!(out.allowed_failures, 0);
        assert!(!out.overall);
        let many: Vec<Check> = std::iter::repeat_n(fail_stat.clone(), 1)
            .chain(std::iter::repeat_n(
                Check { verdict: Verdict::Pass, ..fail_stat.clone() },
                999,
            ))
            .collect();
        assert!(apply_policy(&many).overall);
        assert!(!apply_policy(&[fail_exact]).overall);
    }
}
