//! Numerical tools for the Barnes double zeta-function
//! `zeta_2(s, alpha; v, w) = sum_{m,n >= 0} (alpha + v m + w n)^{-s}`:
//! several independent evaluators, the diagonal series that governs its mean square,
//! a mean-square engine over `[1, T]`, and remainder-exponent fitting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod diagonal;
pub mod error;
pub mod evaluator;
pub mod meansquare;
pub mod params;
pub mod quadrature;
pub mod sum;

pub use error::{Error, Result};
pub use params::{
    classify_region, validate_params, BarnesParams, ComplexPoint, IrrationalScale, RawParams,
    RegionTag, Tolerance,
};
