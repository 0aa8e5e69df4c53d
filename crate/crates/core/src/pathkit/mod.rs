//! Brownian path generation and the pathwise functionals built on it.
//!
//! A single driving Brownian motion `W` with running maximum `M` carries
//! every process of interest through two couplings:
//!
//! * Lévy: `(M - W, M)` has the law of `(|B|, L)`, so the first time `M`
//!   reaches 1 plays the role of both `T_1` (for `W`) and `tau_1` (for `B`).
//! * Pitman: `2M - W` is a three-dimensional Bessel process `R` whose future
//!   infimum is `J = M`; the last passage of `R` at 1 is again `T_1`.
//!
//! Paths are stepped on a graded grid: the step is `dt` near the running
//! maximum and grows like `((M - W) / k)^2` away from it. Increments are exact
//! Gaussians for any step, and with bridge correction the maximum inside each
//! step is drawn from the exact Brownian-bridge law, so `M` is exact in law at
//! every grid point. The only discretisation left is the placement of the
//! hitting time inside its step and interpolation between grid points.

mod path;
mod triplets;
mod views;

pub use path::{bridge_crossing_probability, simulate_to_time, simulate_until_max_hits, DiscretePath, HitRecord, PathPoint};
pub use triplets::{
    sample_cor2, sample_functional_hp, sample_functional_hp_family, sample_subordinator_pair,
    sample_triplet, sample_triplet_bessel, sample_triplet_hitting, sample_triplet_pseudo_bridge,
    Cor2Variant, HpVariant, SubordinatorPair, TripletKind, TripletSample,
};
pub use views::{direct_local_time, levy_view, pitman_view, BesselView, LocalTimeEstimate, ReflectedView};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("invalid step scheme: {0}")]
    InvalidScheme(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("horizon exhausted after {chunks} chunks (t = {horizon:.3e}) without a hit")]
    HorizonExhausted { chunks: u32, horizon: f64 },
}

/// How level crossings inside a step are detected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingCorrection {
    /// Grid values only: the classical discretely monitored maximum.
    None,
    /// Brownian-bridge maximum inside every step. A step from `x0` to `x1`
    /// below level `a` crosses with probability `exp(-2(a-x0)(a-x1)/h)`.
    Bridge,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepScheme {
    /// Finest time step, used within `grading * sqrt(dt)` of the running max.
    pub dt: f64,
    /// The horizon grows in chunks of `2^k * initial_horizon`; this many
    /// chunks without a hit is an error.
    pub max_chunks: u32,
    pub crossing_correction: CrossingCorrection,
    pub initial_horizon: f64,
    /// `Some(k)`: steps of `max(dt, ((M - W)/k)^2)`. `None`: uniform `dt`.
    pub grading: Option<f64>,
}

impl StepScheme {
    pub const DEFAULT_GRADING: f64 = 4.0;
    pub const DEFAULT_MAX_CHUNKS: u32 = 40;

    pub fn new(dt: f64) -> Result<Self, PathError> {
        let s = Self {
            dt,
            max_chunks: Self::DEFAULT_MAX_CHUNKS,
            crossing_correction: CrossingCorrection::Bridge,
            initial_horizon: 1.0,
            grading: Some(Self::DEFAULT_GRADING),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_correction(mut self, c: CrossingCorrection) -> Self {
        self.crossing_correction = c;
        self
    }

    pub fn with_grading(mut self, grading: Option<f64>) -> Self {
        self.grading = grading;
        self
    }

    pub fn with_max_chunks(mut self, max_chunks: u32) -> Self {
        self.max_chunks = max_chunks;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn validate(&self) -> Result<(), PathError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(PathError::InvalidScheme(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.max_chunks < 1 || self.max_chunks > 60 {
            return Err(PathError::InvalidScheme(format!(
                "max_chunks must be in 1..=60, got {}",
                self.max_chunks
            )));
        }
        if !(self.initial_horizon > 0.0 && self.initial_horizon.is_finite()) {
            return Err(PathError::InvalidScheme("initial_horizon must be > 0".into()));
        }
        if let Some(k) = self.grading {
            if !(k > 0.0 && k.is_finite()) {
                return Err(PathError::InvalidScheme(format!("grading must be > 0, got {k}")));
            }
        }
        Ok(())
    }

    /// Total simulated time covered once every chunk is used.
    pub fn horizon_limit(&self) -> f64 {
        self.initial_horizon * ((2f64).powi(self.max_chunks as i32) - 1.0)
    }

    /// Step size when the path sits `gap` below its running maximum.
    #[inline]
    pub(crate) fn step_for_gap(&self, gap: f64) -> f64 {
        match self.grading {
            Some(k) => {
                let g = gap / k;
                (g * g).max(self.dt)
            }
            None => self.dt,
        }
    }
}

/// Compensated (Neumaier) running sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
