//! Exact integer and polynomial arithmetic.
//!
//! Integers are GMP-backed [`rug::Integer`]s; every other module builds on
//! the sparse trivariate and dense univariate polynomials defined here.

mod resultant;
mod tri;
mod uni;

pub use resultant::{bareiss_determinant, resultant, sylvester_matrix};
pub use tri::{Exponents, TriPoly, Var};
pub use uni::UniPoly;

pub use rug::Integer as BigInt;
