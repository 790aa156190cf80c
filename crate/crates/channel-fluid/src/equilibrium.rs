use std::f64::consts::PI;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::arakawa::node_integral;
use crate::ChannelGeometry;

/// Profiles of the shear flow u_e = (Γ(y), 0), Γ(y) = sin(y + π/2).
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumFields {
    pub y: Vec<f64>,
    pub u_e: Vec<f64>,
    pub omega_e: Vec<f64>,
    pub psi_0: Vec<f64>,
}

pub fn equilibrium_fields(geom: &ChannelGeometry) -> EquilibriumFields {
    let y = geom.ys();
    EquilibriumFields {
        u_e: y.iter().map(|&y| (y + PI / 2.0).sin()).collect(),
        omega_e: y.iter().map(|&y| -(y + PI / 2.0).cos()).collect(),
        psi_0: y.iter().map(|&y| (y + PI / 2.0).cos()).collect(),
        y,
    }
}

impl EquilibriumFields {
    /// ω_e spread over the grid.
    pub fn omega_field(&self, nx: usize) -> Array2<f64> {
        Array2::from_shape_fn((self.y.len(), nx), |(j, _)| self.omega_e[j])
    }
}

/// Momentum ∫u_e,₁ of the equilibrium, by the midpoint rule on half rows.
pub fn equilibrium_momentum(geom: &ChannelGeometry) -> f64 {
    let s: f64 = geom.ys_half().iter().map(|&y| (y + PI / 2.0).sin()).sum();
    geom.lx() * geom.dy() * s
}

/// Smooth vorticity perturbation with maximum amplitude `amp`.
///
/// It is the Laplacian of ψ' = Σ (a cos kₘx + b sin kₘx) sin²(nπy/L_y) over
/// m, n ∈ {1, 2, 3}, with Gaussian coefficients drawn from a seeded stream.
/// ψ' and its normal derivative vanish on the walls, so the perturbation
/// carries no circulation; the residual quadrature error is removed too.
pub fn seeded_perturbation(geom: &ChannelGeometry, amp: f64, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ly = geom.ly();
    let mut f = Array2::<f64>::zeros((geom.ny + 1, geom.nx));
    for m in 1..=3 {
        let k = geom.wavenumber(m);
        for n in 1..=3 {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            let l = n as f64 * PI / ly;
            for j in 0..=geom.ny {
                let y = geom.y(j);
                let s2 = (l * y).sin().powi(2);
                let lap_y = 2.0 * l * l * (2.0 * l * y).cos();
                for i in 0..geom.nx {
                    let x = geom.x(i);
                    let c = a * (k * x).cos() + b * (k * x).sin();
                    f[[j, i]] += c * (lap_y - k * k * s2);
                }
            }
        }
    }
    let max = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    f.mapv_inplace(|v| v * amp / max);
    let mean = node_integral(f.view(), geom) / (geom.lx() * geom.ly());
    f.mapv_inplace(|v| v - mean);
    f
}
