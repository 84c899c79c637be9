//! Mild solutions of Hilfer fractional integro-differential Cauchy problems
//! with nonlocal initial conditions, for diagonal almost sectorial operators.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod exec;
pub mod fracops;
pub mod harness;
pub mod operators;
pub mod quad;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
pub use exec::Exec;
