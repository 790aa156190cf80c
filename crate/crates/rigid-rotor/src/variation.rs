use algebra_core::{cross, so3_ad_star};
use nalgebra::{Matrix2, Matrix3, Vector3};

/// Second variation of the energy ½⟨ν, μ⁻¹ν⟩ on the coadjoint orbit through ν_e,
/// in the direction δν = ad(v)*ν_e: ⟨δν, μ⁻¹δν + [v, μ⁻¹ν_e]⟩.
pub fn second_variation_so3(nu_e: [f64; 3], v: [f64; 3], metric: &Matrix3<f64>) -> f64 {
    let inv = metric.try_inverse().expect("metric must be invertible");
    let apply = |a: [f64; 3]| {
        let r = inv * Vector3::from(a);
        [r[0], r[1], r[2]]
    };
    let dnu = so3_ad_star(v, nu_e);
    let a = apply(dnu);
    let b = cross(v, apply(nu_e));
    dnu[0] * (a[0] + b[0]) + dnu[1] * (a[1] + b[1]) + dnu[2] * (a[2] + b[2])
}

/// The form restricted to the orbit tangent space, in the basis δν = ad(vᵢ)*ν_e
/// for two generators `basis` (polarized).
pub fn reduced_second_variation(
    nu_e: [f64; 3],
    basis: [[f64; 3]; 2],
    metric: &Matrix3<f64>,
) -> Matrix2<f64> {
    let q = |v: [f64; 3]| second_variation_so3(nu_e, v, metric);
    let add = |a: [f64; 3], b: [f64; 3]| [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
    let q0 = q(basis[0]);
    let q1 = q(basis[1]);
    let b01 = 0.5 * (q(add(basis[0], basis[1])) - q0 - q1);
    Matrix2::new(q0, b01, b01, q1)
}
