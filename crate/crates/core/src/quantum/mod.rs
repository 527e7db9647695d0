//! Quantum systems: Gaussian packets under quadratic Hamiltonians, a
//! split-operator reference integrator and the quantized baker's map.

pub mod bvs;
pub mod gaussian;
pub mod split_operator;

pub use bvs::{bvs_baker, bvs_coherent_state, bvs_transform, unitarity_defect, BakerOperator};
pub use gaussian::{
    barrier_overlap_unscaled, gaussian_autocorrelation, log_barrier_overlap_unscaled, log_gaussian_autocorrelation,
    GaussianState, Potential, QuadraticSystem,
};
pub use split_operator::{split_operator_autocorrelation, split_operator_propagate, SplitOperator};
