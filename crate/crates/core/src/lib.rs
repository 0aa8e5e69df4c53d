//! Monte Carlo and quadrature checks of identities in law between functionals
//! of a Brownian motion stopped at a hitting time, its local time and the
//! associated three-dimensional Bessel process.
//!
//! * [`pathkit`] simulates driving paths and reads off the coupled processes.
//! * [`laws`] holds closed-form densities and exact reference samplers.
//! * [`stats`] turns samples into KS, moment and extrapolation verdicts.
//! * [`experiments`] binds the three into named, reproducible recipes.

pub mod experiments;
pub mod laws;
pub mod pathkit;
pub mod rng;
pub mod stats;

pub use rng::RandomStream;
