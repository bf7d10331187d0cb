//! Numerical laboratory for boundary behavior of fractional elliptic problems
//! on balls: explicit Green functions, principal-value evaluation of
//! integro-differential operators, Hopf-type boundary quotients, and a
//! constructive example with vanishing fractional normal derivative.

pub mod error;
pub mod geom;
pub mod par;
pub mod specialfn;

pub mod counterexample;
pub mod dirichlet;
pub mod greenball;
pub mod hopf;
pub mod operator;

pub use error::{Error, Result};
