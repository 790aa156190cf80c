use algebra_core::{cross, kk_metric_inverse};
use nalgebra::Matrix3;

use crate::params::{ControlGainK, RigidState, RotorParams};

/// Free rigid body with rotor: `Π̇ = −Ω×Π`, `q̇ = 0`, `(Ω, ·) = (μ₀ᴾ)⁻¹(Π, q)`.
pub fn free_rhs(state: &RigidState, params: &RotorParams) -> ([f64; 3], f64) {
    let l = params.lambda();
    let i3 = params.big_i3();
    let pi = state.pi;
    let omega = [pi[0] / l[0], pi[1] / l[1], (pi[2] - state.q) / i3];
    (cross(pi, omega), 0.0)
}

/// Angular velocity of the closed loop with `q = p_k + kΠ₃`.
fn controlled_omega(pi: [f64; 3], gain: &ControlGainK, params: &RotorParams) -> [f64; 3] {
    let l = params.lambda();
    let i3 = params.big_i3();
    [
        pi[0] / l[0],
        pi[1] / l[1],
        ((1.0 - gain.k) * pi[2] - gain.p_k) / i3,
    ]
}

/// Closed-loop equations for Π.
pub fn controlled_rhs(pi: [f64; 3], gain: &ControlGainK, params: &RotorParams) -> [f64; 3] {
    cross(pi, controlled_omega(pi, gain, params))
}

/// Lie-Poisson right-hand side from an arbitrary Kaluza-Klein inverse metric and momentum p.
pub fn lie_poisson_rhs(pi: [f64; 3], p: f64, kk_inverse: &nalgebra::DMatrix<f64>) -> [f64; 3] {
    let v = kk_inverse * nalgebra::DVector::from_column_slice(&[pi[0], pi[1], pi[2], p]);
    cross(pi, [v[0], v[1], v[2]])
}

/// Reference closed-loop RHS through the modified metric and p̃_k.
pub fn controlled_rhs_via_metric(
    pi: [f64; 3],
    gain: &ControlGainK,
    params: &RotorParams,
) -> Result<[f64; 3], algebra_core::AlgebraError> {
    let m = gain.modified(params)?;
    let inv = kk_metric_inverse(&m.data)?.blocks;
    Ok(lie_poisson_rhs(pi, gain.p_tilde(params), &inv))
}

/// 1 > k > 1 − I₃/λ₂.
pub fn stability_condition(gain: &ControlGainK, params: &RotorParams) -> bool {
    gain.k < 1.0 && gain.k > stability_threshold(params)
}

pub fn stability_threshold(params: &RotorParams) -> f64 {
    1.0 - params.big_i3() / params.lambda()[1]
}

/// Jacobian of [`controlled_rhs`] at Π.
pub fn controlled_jacobian(pi: [f64; 3], gain: &ControlGainK, params: &RotorParams) -> Matrix3<f64> {
    let l = params.lambda();
    let w = controlled_omega(pi, gain, params);
    let d = Matrix3::from_diagonal(&nalgebra::Vector3::new(
        1.0 / l[0],
        1.0 / l[1],
        (1.0 - gain.k) / params.big_i3(),
    ));
    let hat = |a: [f64; 3]| {
        Matrix3::new(0.0, -a[2], a[1], a[2], 0.0, -a[0], -a[1], a[0], 0.0)
    };
    // d(Π×Ω) = δΠ×Ω + Π×(DδΠ)
    -hat(w) + hat(pi) * d
}

/// Largest real part of the closed-loop linearization at Π.
pub fn linearized_max_growth(pi: [f64; 3], gain: &ControlGainK, params: &RotorParams) -> f64 {
    controlled_jacobian(pi, gain, params)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Max growth rate at (0, M, 0) for each gain, with p_k = 0.
pub fn linear_threshold_scan(params: &RotorParams, m: f64, ks: &[f64]) -> Vec<(f64, f64)> {
    let eval = |k: &f64| {
        let gain = ControlGainK { k: *k, p_k: 0.0 };
        (*k, linearized_max_growth([0.0, m, 0.0], &gain, params))
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ks.par_iter().map(eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ks.iter().map(eval).collect()
    }
}
