//! Small private key attack on common prime RSA.
//!
//! The pipeline runs [`keygen`] → [`lattice`] → [`lll`] → [`extract`]:
//! build the trivariate attack polynomial from a public key, form the
//! shift-polynomial lattice, reduce it, keep the short vectors whose
//! polynomials vanish over the integers, eliminate variables with resultants
//! and factor `N` from the recovered root `(d, ak, bk)`. [`bounds`] evaluates
//! the published attack bounds as functions of `gamma`.

pub mod attack;
pub mod bigpoly;
pub mod bounds;
pub mod lattice;
pub mod lll;
pub mod error;
pub mod experiment;
pub mod extract;
pub mod keygen;

pub use error::{Error, Result};
