use control_design::casimir_profile;
use ndarray::ArrayView2;

use crate::arakawa::node_integral;
use crate::{equilibrium_fields, velocity_from_stream, ChannelGeometry, FluidState, MacField, ModifiedPoisson, VorticityModel};

/// One row of the time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    /// Kinetic energy ½⟨ν, [μ_C]⁻¹ν⟩.
    pub energy: f64,
    pub enstrophy: f64,
    /// ∫(ω − ω_e)².
    pub pert_enstrophy: f64,
    /// ∫(ω − ω_e), the circulation of the perturbation.
    pub circulation: f64,
    /// The energy-Casimir functional relative to the equilibrium.
    pub h2: f64,
    pub p_norm: f64,
}

impl Diagnostics {
    pub const CSV_HEADER: [&'static str; 7] =
        ["t", "energy", "enstrophy", "pert_enstrophy", "circulation", "H2", "p_norm"];

    pub fn values(&self) -> [f64; 7] {
        [self.t, self.energy, self.enstrophy, self.pert_enstrophy, self.circulation, self.h2, self.p_norm]
    }
}

// ½(Σ Φu₁² + Σ u₂²) over the staggered grid.
pub(crate) fn kinetic_energy(u: &MacField, phi_half: &[f64], geom: &ChannelGeometry) -> f64 {
    let mut s = 0.0;
    for (j, row) in u.u1.rows().into_iter().enumerate() {
        s += phi_half[j] * row.iter().map(|v| v * v).sum::<f64>();
    }
    for (j, row) in u.u2.rows().into_iter().enumerate() {
        s += geom.weight(j) * row.iter().map(|v| v * v).sum::<f64>();
    }
    0.5 * s * geom.cell_area()
}

/// Modified kinetic energy of a vorticity perturbation carrying no momentum.
pub fn perturbation_energy(poisson: &ModifiedPoisson, d_omega: ArrayView2<f64>) -> f64 {
    let g = poisson.geometry();
    let psi = poisson.solve(d_omega, 0.0);
    let u = velocity_from_stream(psi.view(), g, poisson.spectral());
    kinetic_energy(&u, poisson.phi_half(), g)
}

pub fn diagnostics(state: &FluidState, model: &VorticityModel) -> Diagnostics {
    let g = &model.geom;
    let w = state.omega.view();
    let u = model.velocity(w);
    let we = equilibrium_fields(g).omega_e;
    let mut dw = state.omega.clone();
    for (j, mut row) in dw.rows_mut().into_iter().enumerate() {
        row -= we[j];
    }
    let cas = casimir_profile(&model.control);
    let mut rem = dw.clone();
    for ((j, i), v) in rem.indexed_iter_mut() {
        *v = cas.remainder(we[j], state.omega[[j, i]]);
    }
    Diagnostics {
        t: state.t,
        energy: kinetic_energy(&u, model.poisson.phi_half(), g),
        enstrophy: node_integral(w.mapv(|v| v * v).view(), g),
        pert_enstrophy: node_integral(dw.mapv(|v| v * v).view(), g),
        circulation: node_integral(dw.view(), g),
        h2: perturbation_energy(&model.poisson, dw.view()) + node_integral(rem.view(), g),
        p_norm: 0.0,
    }
}
