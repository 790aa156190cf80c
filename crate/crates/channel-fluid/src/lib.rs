//! Incompressible charged fluid in a periodic channel.
//!
//! Fields live on a uniform grid that is spectral in x and uses second-order
//! differences in y. Velocities are staggered in y: u₁ sits on half rows
//! y_{j+½}, u₂ on the node rows y_j. The stream function, vorticity and the
//! charge of the vorticity-form solver live on node rows.

mod arakawa;
mod diagnostics;
mod equilibrium;
mod exec;
mod forced;
mod geometry;
pub mod io;
mod mac;
mod poisson;
mod rayleigh;
mod spectral;
mod velocity;
mod vorticity;

pub use arakawa::{advect_scalar, jacobian};
pub use diagnostics::{diagnostics, perturbation_energy, Diagnostics};
pub use equilibrium::{equilibrium_fields, equilibrium_momentum, seeded_perturbation, EquilibriumFields};
pub use exec::Exec;
pub use forced::{force_pairing, forced_evolution_step, CMap, CVariant, ForcedModel};
pub use geometry::ChannelGeometry;
pub use mac::{
    curl, diamond, divergence, gradient, leray_project, mac_inner, velocity_from_stream, MacField,
};
pub use poisson::{poisson_solve_modified, ModifiedPoisson};
pub use rayleigh::{rayleigh_growth_rate, RayleighMode};
pub use spectral::Spectral;
pub use velocity::{charged_euler_rhs_velocity, VelocityModel};
pub use vorticity::{closed_loop_step, FluidState, Scheme, StepInfo, VorticityModel};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FluidError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("metric not positive definite: min Φ_γ = {0:.6e}")]
    NotPositive(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite field at t = {0}")]
    NonFinite(f64),
    #[error("time step must be positive, got {0}")]
    TimeStep(f64),
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("snapshot format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Control(#[from] control_design::DesignError),
}
