//! Stabilizing control for the charged shear flow in a channel
//! `[0, Xπ] × [0, Yπ]` with equilibrium vorticity ω_e(y) = sin y.

mod casimir;
mod control;
mod design;
pub mod quad;

pub use casimir::{casimir_profile, CasimirProfile};
pub use control::{
    apply_c, condition_report, enstrophy_bound, A0Profile, Condition, ConditionReport,
    ShearControl,
};
pub use design::{
    default_margin, design_constants, kappa, BMap, DesignConstants,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("width out of validity range: need 1/2 <= Y < 1, got Y = {0}")]
    Width(f64),
    #[error("channel too short for the design: alpha = {0} > 1")]
    TooShort(f64),
    #[error("channel length must be positive, got X = {0}")]
    Length(f64),
    #[error("metric not positive definite: gamma*a0^2 = {0} >= 1")]
    NotPositive(f64),
    #[error("extension margin too large: kappa*Phi_max = {kphi} >= r = {r}")]
    Margin { kphi: f64, r: f64 },
    #[error("field has {rows} rows but {expected} y samples were given")]
    Rows { rows: usize, expected: usize },
    #[error("the enstrophy bound needs a designed control")]
    NotDesigned,
}

/// Equilibrium vorticity ω_e(y) = −cos(y + π/2) = sin y.
pub fn omega_e(y: f64) -> f64 {
    y.sin()
}

/// Equilibrium velocity Γ(y) = sin(y + π/2) = cos y.
pub fn gamma_profile(y: f64) -> f64 {
    y.cos()
}
