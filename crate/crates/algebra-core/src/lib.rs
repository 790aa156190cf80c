//! Finite-dimensional Lie-Poisson primitives and Kaluza-Klein metric assembly.

mod diamond;
mod kk;
mod so3;

pub use diamond::discrete_diamond;
pub use kk::{
    condition_number, kk_metric, kk_metric_inverse, modified_kk_data, rigid_body_data, KKData,
    MetricMatrix, ModifiedKK, COND_LIMIT,
};
pub use so3::{cross, so3_ad_star};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{what} is singular (condition number {cond:.3e})")]
    Singular { what: &'static str, cond: f64 },
    #[error("control parameter out of range: gamma = {gamma} makes {what} singular (condition number {cond:.3e})")]
    ControlOutOfRange {
        gamma: f64,
        what: &'static str,
        cond: f64,
    },
}
