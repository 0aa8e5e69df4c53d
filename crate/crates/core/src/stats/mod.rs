//! Empirical distributions and the tests that turn identities in law into
//! verdicts.

mod ks;
mod moments;
mod policy;
mod richardson;
mod sample;

pub use ks::{
    kolmogorov_sf, ks_against_density, ks_one_sample, ks_one_sample_fallible, ks_two_sample,
    rank_independence, IndependenceReport, KsReport,
};
pub use moments::{moment_report, moment_report_values, proportion_report, MomentAccumulator, MomentReport};
pub use policy::{allowed_failures, poisson_binomial_pmf};
pub use richardson::{richardson, richardson_fit, BiasLadder, RichardsonFit};
pub use sample::{EmpiricalSample, Provenance};

use thiserror::Error;

use crate::laws::LawError;

/// Default per-test level for KS and independence checks.
pub const DEFAULT_LEVEL: f64 = 0.001;

/// Two-sided normal tail beyond three standard errors, the implied level of a
/// `|z| < 3` check.
pub const THREE_SIGMA_LEVEL: f64 = 0.002_699_796_063_260_207;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("sample too small: n = {n}, need at least {min}")]
    Undersized { n: usize, min: usize },
    #[error("non-finite value in sample")]
    NonFinite,
    #[error("degenerate ladder: {0}")]
    DegenerateLadder(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Law(#[from] LawError),
}
