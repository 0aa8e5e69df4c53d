use rayon::prelude::*;

use super::{Check, ExperimentError, ExperimentSpec};
use crate::pathkit::{PathError, StepScheme};
use crate::rng::{family_index, RandomStream};
use crate::stats::{EmpiricalSample, Provenance};

/// Draws per stream for exact samplers; fixed so results do not depend on
/// how the work is split between threads.
const EXACT_CHUNK: usize = 1 << 14;

/// Largest tolerated share of paths that exhaust their horizon.
pub const PATH_FAILURE_BUDGET: f64 = 1e-3;

pub(crate) struct Ctx<'a> {
    pub spec: &'a ExperimentSpec,
    base: u32,
    requested: usize,
    failed: usize,
    pub checks: Vec<Check>,
}

impl<'a> Ctx<'a> {
    pub fn new(spec: &'a ExperimentSpec, base: u32) -> Self {
        Self {
            spec,
            base,
            requested: 0,
            failed: 0,
            checks: Vec::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.spec.master_seed
    }

    pub fn scheme(&self) -> &StepScheme {
        &self.spec.scheme
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        self.checks.extend(cs);
    }

    /// `n` independent path functionals, one stream per path. Paths that
    /// exhaust their horizon are dropped and counted; any other error aborts.
    pub fn simulate<T: Send>(
        &mut self,
        family: u32,
        n: usize,
        f: impl Fn(&mut RandomStream) -> Result<T, PathError> + Sync,
    ) -> Result<Vec<T>, ExperimentError> {
        let fam = self.base + family;
        let seed = self.seed();
        let out: Vec<Result<T, PathError>> = (0..n as u64)
            .into_par_iter()
            .map(|i| f(&mut RandomStream::new(seed, family_index(fam, i))))
            .collect();
        self.requested += n;
        let mut kept = Vec::with_capacity(n);
        for r in out {
            match r {
                Ok(v) => kept.push(v),
                Err(PathError::HorizonExhausted { .. }) => self.failed += 1,
                Err(e) => return Err(e.into()),
            }
        }
        Ok(kept)
    }

    /// `n` exact draws, chunked over streams.
    pub fn exact<T: Send>(&self, family: u32, n: usize, f: impl Fn(&mut RandomStream) -> T + Sync) -> Vec<T> {
        let fam = self.base + family;
        let seed = self.seed();
        let chunks = n.div_ceil(EXACT_CHUNK);
        let parts: Vec<Vec<T>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut s = RandomStream::new(seed, family_index(fam, c as u64));
                let len = EXACT_CHUNK.min(n - c * EXACT_CHUNK);
                (0..len).map(|_| f(&mut s)).collect()
            })
            .collect();
        parts.into_iter().flatten().collect()
    }

    pub fn sample(&self, tag: &str, values: Vec<f64>, simulated: bool) -> Result<EmpiricalSample, ExperimentError> {
        let mut p = Provenance::new(tag).with_seed(self.seed());
        if simulated {
            p = p.with_scheme(self.spec.scheme);
        }
        Ok(EmpiricalSample::new(values, p)?)
    }

    /// Appends the path-failure check if any path was simulated.
    pub fn finish(mut self) -> (Vec<Check>, usize) {
        if self.requested > 0 {
            let share = self.failed as f64 / self.requested as f64;
            self.checks.push(Check::below("path_failure_share", share, PATH_FAILURE_BUDGET));
        }
        (self.checks, self.failed)
    }
}

/// Column `k` of a list of fixed-size rows.
pub(crate) fn column<const N: usize>(rows: &[[f64; N]], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k]).collect()
}
