//! Exact polynomial arithmetic for ratios of q-factorials.
//!
//! A [`FactorialPair`] `(a; b)` names the ratio `[a_1]!...[a_r]! / [b_1]!...[b_s]!`.
//! Landau's floor-sum criterion decides whether the ratio is a polynomial,
//! [`dfact`] builds it, and [`shape`] inspects its coefficient profile.
//! [`scanner`] sweeps whole families.

pub mod cyclotomic;
pub mod dfact;
pub mod error;
pub mod families;
pub mod identities;
pub mod landau;
pub mod poly;
pub mod scanner;
pub mod shape;

pub use dfact::{build, Method};
pub use error::{Error, Result};
pub use families::{FamilyId, FamilyInstance, Params, Partition, Registry};
pub use landau::{FactorialPair, LandauVerdict};
pub use poly::Poly;
pub use scanner::{Check, ScanConfig, ScanRecord};
pub use shape::{analyze, ShapeReport, Verdict};
