//! Finite-field instances of the explicit constructions: the case-V conic
//! bundle with its critical points, the compatible automorphism pairs, and
//! the isogeny-invariant conic of case I.

pub mod automorphisms;
pub mod case_one;
pub mod case_v;
pub mod conic;

pub use automorphisms::{automorphism_pairs, AutomorphismReport};
pub use case_one::{case_one_invariant_conic, order_three_point, CaseOneReport};
pub use case_v::{
    bicanonical_kernel, build_case_v, build_case_v_with, zeuthen_segre_check, BicanonicalKernel, CaseVInstance,
    CritReport, ZeuthenSegre, NORMALIZED_COEFFICIENTS,
};
pub use conic::{ConicBundle, SingularityKind, SingularityReport};

/// Retry budget for seeded genericity searches and the largest extension
/// degree used to find geometric points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LabOptions {
    pub retries: u32,
    pub field_ext_max: usize,
}

impl Default for LabOptions {
    fn default() -> LabOptions {
        LabOptions { retries: 256, field_ext_max: 2 }
    }
}
