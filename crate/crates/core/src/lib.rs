//! Continuous-stage Runge-Kutta methods built on weighted orthogonal
//! polynomials: construction, reduction to Butcher tableaux by quadrature,
//! analysis and integration.

// NaN-rejecting comparisons and index loops over coupled arrays are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analyze;
pub mod cli;
pub mod cstab;
mod dd;
pub mod error;
pub mod golden;
pub mod integrate;
pub mod orthopoly;
pub mod poly;
pub mod quadrature;
pub mod reduce;

pub use cstab::{ContinuousTableau, Provenance, Variant};
pub use error::{Error, Result};
pub use orthopoly::{OrthoBasis, WeightSpec};
pub use quadrature::QuadratureRule;
pub use reduce::{to_rk, RKTableau, ReductionMode};
