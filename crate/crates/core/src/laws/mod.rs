//! Closed-form laws and exact samplers for the right-hand sides of the
//! identities being checked.
//!
//! Everything here is discretisation free. Densities are pointwise formulas
//! or Maxwell scale mixtures of them, CDFs come from adaptive Gauss-Kronrod
//! quadrature, and the samplers build `(B_1, L_1)` from the factorization
//! `(|B_s|, L_s) = R_s (1 - U, U)` with `R` Maxwell distributed.

mod density;
mod formulas;
pub mod quadrature;
mod reference;
pub mod special;

pub use density::{ac_family, AcFamily, AnalyticDensity, TabulatedCdf};
pub use formulas::{
    a_c_density, a_c_positive_mass, alpha_c_pdf, alpha_pdf, c_p, descb_weighted_integral,
    h_density, joint_density_b_l, k_density, l_density, mellin_abs_b1_l1, r_gamma_pdf, u_density,
    z_c_density, Side,
};
pub use quadrature::{integrate, QuadResult, QuadratureConfig};
pub use reference::{sample_reference, ReferenceDraw, ReferenceKind};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LawError {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("quadrature did not converge: error estimate {achieved:.3e} > {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("unknown density {0:?}")]
    UnknownDensity(String),
}
