//! Exact finite-field toolkit for minimal surfaces with `p_g = 2`, `q = 1`,
//! `K^2 = 5` studied through their genus-2 Albanese fibration over an
//! elliptic curve `B`.

pub mod error;
pub mod field_curve;
pub mod bundle_calc;
pub mod classifier;
pub mod fibration_lab;
pub mod picard;
pub mod rr_spaces;
pub mod strata_engine;

pub use error::{Error, Result};
