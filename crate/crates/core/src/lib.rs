//! Exact-arithmetic analysis of critical points of surfaces z = f(x,y),
//! together with a numerical verification harness.
//!
//! The exact side computes Newton polygons, adapted coordinate systems, the
//! height of a critical point and its critical L^p exponent, decides the
//! exceptional conditions of the underlying boundedness theorem, and builds a
//! sliver decomposition of a punctured neighborhood with damping
//! specifications attached to each region.
//!
//! The numeric side estimates sublevel-set growth exponents, spot-checks
//! pointwise comparability bounds on sliver regions, scans damping-factor
//! integrability over shrinking annuli, and fits oscillatory-integral decay
//! rates.
//!
//! Everything in the exact core works over arbitrary-precision rationals; no
//! epsilon geometry anywhere.

// Error values carry exact rationals (witness intervals, orders); they are
// cold-path and not worth boxing.
#![allow(clippy::result_large_err)]

pub mod adapt;
pub mod classify;
pub mod error;
pub mod newton;
pub mod parser;
pub mod poly;
pub mod rat;
pub mod realroots;
pub mod sampling;
pub mod slivers;
pub mod verify;

pub use error::Error;
pub use poly::{LinearMap2, Polynomial, PsiSeries, Term};
pub use rat::Rat;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;
