//! Truncations of Dedekind zeta functions of cyclotomic fields: ideal-count
//! coefficient tables, the resulting Dirichlet polynomials, zero-free strip
//! bounds, and argument-principle zero counting and localization, with
//! counting-discrepancy and coefficient-density checks on top.

pub mod coefficients;
pub mod cyclotomic;
pub mod dirichlet;
pub mod error;
pub mod numerics;
pub mod report;
pub mod zeros;

pub use coefficients::{CoefficientKind, CoefficientTable};
pub use cyclotomic::CyclotomicField;
pub use dirichlet::PartialSum;
pub use error::{Error, Result};
pub use zeros::{
    CountCheck, DescartesCheck, Rectangle, StripBounds, Tolerances, ZeroCountResult, ZeroEngine,
    ZeroRecord,
};
