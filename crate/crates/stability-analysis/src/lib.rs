//! Spectral stability tests for the controlled shear flow: the second
//! variation of the energy-Casimir functional and the first eigenvalue of the
//! drifted Laplacian that bounds it.

mod drifted;
mod eigen;
mod second_variation;

pub use drifted::{
    drifted_setup, fll_bound, g_zz, lambda1_drifted, reverse_poincare_check, DriftedOperator,
    DriftedSetup, Lambda1, ReversePoincare,
};
pub use eigen::{definiteness, extremes, lanczos_extremes, Extremes, DENSE_LIMIT};
pub use second_variation::{second_variation_matrix, SecondVariation};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Fluid(#[from] channel_fluid::FluidError),
    #[error(transparent)]
    Design(#[from] control_design::DesignError),
}
