//! Dynamics of few-qubit absorption refrigerators with Markovian, finite spin-star and hybrid environments.

// `!(x > 0.0)` is used on purpose to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod model;
pub mod observables;
pub mod quantum;
pub mod scenario;

pub use error::{Error, Result};
pub use faer::c64;
