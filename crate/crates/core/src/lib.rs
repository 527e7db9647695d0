//! Projective Lyapunov exponents for classical ensembles and quantum states.
//!
//! States live on the projective space of a weighted `L^2` basis. The distance
//! between rays is mapped to an unbounded divergence whose exponential growth
//! rate is the exponent estimated here.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod numeric;
pub mod quantum;

pub use error::{Error, Result};
