use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::pathkit::StepScheme;

/// Where a sample came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tag: String,
    pub scheme: Option<StepScheme>,
    pub master_seed: Option<u64>,
}

impl Provenance {
    pub fn new(tag: impl Into<String>) -> Self {
        Self {
            tag: tag.into(),
            ..Self::default()
        }
    }

    pub fn with_scheme(mut self, scheme: StepScheme) -> Self {
        self.scheme = Some(scheme);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = Some(seed);
        self
    }
}

/// A sorted batch of finite draws.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    provenance: Provenance,
}

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>, provenance: Provenance) -> Result<Self, StatsError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { values, provenance })
    }

    /// Unlabelled sample, mostly for tests.
    pub fn from_values(values: Vec<f64>) -> Result<Self, StatsError> {
        Self::new(values, Provenance::default())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Fraction of values `<= x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        if self.values.is_empty() {
            return f64::NAN;
        }
        self.values.partition_point(|&v| v <= x) as f64 / self.values.len() as f64
    }

    /// Applies `f` to every value; `f` must be strictly increasing to keep
    /// the order (checked).
    pub fn map_increasing(&self, f: impl Fn(f64) -> f64) -> Result<Self, StatsError> {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(StatsError::Invalid("map is not increasing".into()));
        }
        Ok(Self {
            values,
            provenance: self.provenance.clone(),
        })
    }
}
