use control_design::ShearControl;
use ndarray::{Array1, Array2, ArrayView2};

use crate::equilibrium::equilibrium_momentum;
use crate::spectral::{row_means, RowShift};
use crate::{
    curl, leray_project, velocity_from_stream, ChannelGeometry, Exec, FluidError, MacField, ModifiedPoisson, Spectral,
};

// u₂ averaged onto half rows.
fn u2_on_half(u2: ArrayView2<f64>, ny: usize) -> Array2<f64> {
    Array2::from_shape_fn((ny, u2.ncols()), |(j, i)| 0.5 * (u2[[j, i]] + u2[[j + 1, i]]))
}

// A half-row field averaged onto node rows; the wall rows are zero.
fn half_on_nodes(f: ArrayView2<f64>, ny: usize) -> Array2<f64> {
    Array2::from_shape_fn((ny + 1, f.ncols()), |(j, i)| {
        if j == 0 || j == ny {
            0.0
        } else {
            0.5 * (f[[j - 1, i]] + f[[j, i]])
        }
    })
}

// ∂_y of a half-row field, centred inside and one-sided second order at the ends.
fn dy_half(f: ArrayView2<f64>, dy: f64) -> Array2<f64> {
    let n = f.nrows();
    Array2::from_shape_fn(f.dim(), |(j, i)| {
        if j == 0 {
            (-3.0 * f[[0, i]] + 4.0 * f[[1, i]] - f[[2, i]]) / (2.0 * dy)
        } else if j == n - 1 {
            (3.0 * f[[n - 1, i]] - 4.0 * f[[n - 2, i]] + f[[n - 3, i]]) / (2.0 * dy)
        } else {
            (f[[j + 1, i]] - f[[j - 1, i]]) / (2.0 * dy)
        }
    })
}

// ∂_y of a node field on interior rows.
fn dy_node(f: ArrayView2<f64>, dy: f64) -> Array2<f64> {
    let n = f.nrows();
    Array2::from_shape_fn(f.dim(), |(j, i)| {
        if j == 0 || j == n - 1 {
            0.0
        } else {
            (f[[j + 1, i]] - f[[j - 1, i]]) / (2.0 * dy)
        }
    })
}

/// a₀ and a₀′ sampled on half and node rows.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Potential {
    pub a_half: Vec<f64>,
    pub da_half: Vec<f64>,
    pub da_node: Vec<f64>,
}

impl Potential {
    pub fn new(geom: &ChannelGeometry, control: &ShearControl) -> Self {
        let half: Vec<(f64, f64, f64)> = geom.ys_half().iter().map(|&y| control.a0_derivs(y)).collect();
        Self {
            a_half: half.iter().map(|d| d.0).collect(),
            da_half: half.iter().map(|d| d.1).collect(),
            da_node: geom.ys().iter().map(|&y| control.a0_derivs(y).1).collect(),
        }
    }
}

// −u·∇u + q u×B with B = −a₀′ẑ, for q on half rows.
fn euler_lorentz(u: &MacField, q: ArrayView2<f64>, pot: &Potential, geom: &ChannelGeometry, sp: &Spectral) -> MacField {
    let (ny, dy) = (geom.ny, geom.dy());
    let u2h = u2_on_half(u.u2.view(), ny);
    let u1n = half_on_nodes(u.u1.view(), ny);
    let qn = half_on_nodes(q, ny);
    let du1x = sp.dx(u.u1.view());
    let du1y = dy_half(u.u1.view(), dy);
    let du2x = sp.dx(u.u2.view());
    let du2y = dy_node(u.u2.view(), dy);
    let mut n1 = Array2::zeros((ny, geom.nx));
    for ((j, i), v) in n1.indexed_iter_mut() {
        let (a, b) = (u.u1[[j, i]], u2h[[j, i]]);
        *v = -(a * du1x[[j, i]] + b * du1y[[j, i]]) - q[[j, i]] * pot.da_half[j] * b;
    }
    let mut n2 = Array2::zeros((ny + 1, geom.nx));
    for j in 1..ny {
        for i in 0..geom.nx {
            let (a, b) = (u1n[[j, i]], u.u2[[j, i]]);
            n2[[j, i]] = -(a * du2x[[j, i]] + b * du2y[[j, i]]) + qn[[j, i]] * pot.da_node[j] * a;
        }
    }
    MacField { u1: n1, u2: n2 }
}

/// −u·∇s for a half-row scalar s.
pub(crate) fn advect_half(u: &MacField, s: ArrayView2<f64>, geom: &ChannelGeometry, sp: &Spectral) -> Array2<f64> {
    let u2h = u2_on_half(u.u2.view(), geom.ny);
    let sx = sp.dx(s);
    let sy = dy_half(s, geom.dy());
    let mut out = Array2::zeros(s.dim());
    for ((j, i), v) in out.indexed_iter_mut() {
        *v = -(u.u1[[j, i]] * sx[[j, i]] + u2h[[j, i]] * sy[[j, i]]);
    }
    out
}

/// Tendencies of the charged Euler equations u̇ + ∇_u u = −∇p + q u×B, q̇ = −u·∇q.
///
/// B = −a₀′(y)ẑ is the curl of the potential a₀ dx. The charge lives on half
/// rows; the pressure is removed by `leray_project`.
pub fn charged_euler_rhs_velocity(
    u: &MacField,
    q: ArrayView2<f64>,
    control: &ShearControl,
    geom: &ChannelGeometry,
    sp: &Spectral,
) -> (MacField, Array2<f64>) {
    let pot = Potential::new(geom, control);
    let n = euler_lorentz(u, q, &pot, geom, sp);
    (leray_project(&n, geom, sp), advect_half(u, q, geom, sp))
}

/// The closed loop in velocity form: the physical velocity u evolves under
/// the charged Euler equations with the charge held at q = −Cν = −γa₀u₁.
///
/// Eliminating q̇ through the feedback turns the momentum balance into
/// (Φu̇₁, u̇₂) = −u·∇u + q u×B − a₀(u·∇q)eₓ + ∇π, which is projected through
/// the modified elliptic operator.
#[derive(Debug, Clone)]
pub struct VelocityModel {
    pub geom: ChannelGeometry,
    pub control: ShearControl,
    pub poisson: ModifiedPoisson,
    pub momentum: f64,
    pot: Potential,
}

impl VelocityModel {
    pub fn new(geom: &ChannelGeometry, control: &ShearControl, exec: Exec) -> Result<Self, FluidError> {
        Ok(Self {
            geom: *geom,
            control: control.clone(),
            poisson: ModifiedPoisson::from_control(geom, control, exec)?,
            momentum: equilibrium_momentum(geom),
            pot: Potential::new(geom, control),
        })
    }

    fn sp(&self) -> &Spectral {
        self.poisson.spectral()
    }

    /// Velocity of the vorticity field ω, with the model's momentum.
    pub fn velocity_of(&self, omega: ArrayView2<f64>) -> MacField {
        let psi = self.poisson.solve(omega, self.momentum);
        velocity_from_stream(psi.view(), &self.geom, self.sp())
    }

    /// Vorticity of the momentum ν = Φu₁dx + u₂dy on interior rows.
    pub fn vorticity(&self, u: &MacField) -> Array2<f64> {
        curl(&self.nu(u), &self.geom, self.sp())
    }

    fn nu(&self, u: &MacField) -> MacField {
        let mut nu = u.clone();
        for (j, mut row) in nu.u1.rows_mut().into_iter().enumerate() {
            row *= self.poisson.phi_half()[j];
        }
        nu
    }

    /// The feedback charge −γa₀u₁ on half rows.
    pub fn charge(&self, u: &MacField) -> Array2<f64> {
        let mut q = u.u1.clone();
        for (j, mut row) in q.rows_mut().into_iter().enumerate() {
            row *= -self.control.gamma * self.pot.a_half[j];
        }
        q
    }

    pub fn rhs(&self, u: &MacField) -> MacField {
        let g = &self.geom;
        let q = self.charge(u);
        let mut n = euler_lorentz(u, q.view(), &self.pot, g, self.sp());
        let adv = advect_half(u, q.view(), g, self.sp());
        for (j, mut row) in n.u1.rows_mut().into_iter().enumerate() {
            row.scaled_add(self.pot.a_half[j], &adv.row(j));
        }
        let w_dot = curl(&n, g, self.sp());
        // ∫N₁ = γ∫u·∇(a₀²u₁) vanishes, so the momentum is held fixed exactly.
        let psi_dot = self.poisson.solve(w_dot.view(), 0.0);
        velocity_from_stream(psi_dot.view(), g, self.sp())
    }

    // Node-row speeds of the mean flow: averages of the half-row means of u₁.
    fn speeds(&self, u: &MacField) -> Vec<f64> {
        let s1 = row_means(u.u1.view());
        let ny = self.geom.ny;
        (0..=ny).map(|j| if j == 0 || j == ny { 0.0 } else { 0.5 * (s1[j - 1] + s1[j]) }).collect()
    }

    fn momentum_of(&self, u: &MacField) -> f64 {
        (&u.u1.t() * &Array1::from(self.poisson.phi_half().to_vec())).sum() * self.geom.cell_area()
    }

    // Velocity whose vorticity is the row-shifted vorticity of u, at the same momentum.
    fn shifted(&self, u: &MacField, shift: &RowShift) -> MacField {
        let w = shift.apply(self.vorticity(u).view());
        let psi = self.poisson.solve(w.view(), self.momentum_of(u));
        velocity_from_stream(psi.view(), &self.geom, self.sp())
    }

    // Tendency minus the mean-flow part −U∂ₓω, mapped back to velocities.
    fn n_frame(&self, u: &MacField, s: &[f64]) -> MacField {
        let mut r = self.rhs(u);
        let mut dw = self.sp().dx(self.vorticity(u).view());
        for (j, mut row) in dw.rows_mut().into_iter().enumerate() {
            row *= s[j];
        }
        let psi = self.poisson.solve(dw.view(), 0.0);
        r.scaled_add(1.0, &velocity_from_stream(psi.view(), &self.geom, self.sp()));
        r
    }

    /// One Lawson RK4 step in the frame of the mean flow.
    ///
    /// The frame acts on the vorticity, as in the vorticity form; the velocity
    /// is rebuilt from the shifted vorticity so it stays of the form ∇ˢψ.
    pub fn step(&self, u: &MacField, dt: f64) -> Result<MacField, FluidError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(FluidError::TimeStep(dt));
        }
        let s = self.speeds(u);
        let h = RowShift::new(self.sp(), &s, dt / 2.0);
        let f = h.doubled();
        let half = |v: &MacField| self.shifted(v, &h);
        let full = |v: &MacField| self.shifted(v, &f);
        let comb = |a: &MacField, c: f64, b: &MacField| {
            let mut r = a.clone();
            r.scaled_add(c, b);
            r
        };
        let k1 = self.n_frame(u, &s);
        let u_half = half(u);
        let k2 = self.n_frame(&comb(&u_half, dt / 2.0, &half(&k1)), &s);
        let k3 = self.n_frame(&comb(&u_half, dt / 2.0, &k2), &s);
        let k4 = self.n_frame(&comb(&full(u), dt, &half(&k3)), &s);
        let mut out = full(u);
        out.scaled_add(dt / 6.0, &full(&k1));
        out.scaled_add(dt / 3.0, &half(&comb(&k2, 1.0, &k3)));
        out.scaled_add(dt / 6.0, &k4);
        if !out.is_finite() {
            return Err(FluidError::NonFinite(dt));
        }
        Ok(out)
    }
}
