//! Experiment runner for projective-space sensitivity exponents: configs in,
//! reproducible CSV, JSON and SVG out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod figure;
pub mod output;
pub mod plot;
pub mod run;
pub mod selftest;

pub use config::ExperimentConfig;
pub use error::{Result, RunError};
pub use run::{run, ExperimentResult};

/// Sizes the global thread pool from `PLYAP_THREADS` when set.
pub fn configure_threads() {
    let Some(n) = std::env::var("PLYAP_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) else {
        return;
    };
    if n == 0 {
        return;
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
        log::warn!("could not size thread pool: {e}");
    }
}
