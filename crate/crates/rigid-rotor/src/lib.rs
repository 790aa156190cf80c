//! Satellite with an internal rotor about its third principal axis.
//!
//! Free dynamics, the feedback `q = p_k + kΠ₃`, the stability condition for the
//! middle axis and second variations on coadjoint orbits of so(3)*.

mod dynamics;
mod integrate;
mod params;
mod variation;

pub use dynamics::{
    controlled_jacobian, controlled_rhs, controlled_rhs_via_metric, free_rhs, lie_poisson_rhs,
    linear_threshold_scan, linearized_max_growth,
    stability_condition, stability_threshold,
};
pub use integrate::{controlled_energy, free_energy, integrate, Sample, Scheme, Trajectory};
pub use params::{ControlGainK, RigidState, RotorParams};
pub use variation::{reduced_second_variation, second_variation_so3};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RigidError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("k must differ from 1")]
    GainIsOne,
    #[error("time step must be positive, got {0}")]
    TimeStep(f64),
    #[error("non-finite state at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },
}
