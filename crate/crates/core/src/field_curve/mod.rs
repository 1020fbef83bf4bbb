//! Finite fields and elliptic-curve group law.

pub mod curve;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod registry;
pub mod velu;

pub use curve::{CurvePoint, EllipticCurve, TorsionSet};
pub use field::{Fe, Field};
pub use velu::{velu_3_isogeny, Isogeny3};
