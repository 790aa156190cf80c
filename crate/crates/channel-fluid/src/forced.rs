use control_design::ShearControl;
use nalgebra::{DMatrix, DVector, LU};
use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use crate::equilibrium::equilibrium_momentum;
use crate::velocity::{advect_half, Potential};
use crate::{
    curl, diamond, jacobian, mac_inner, velocity_from_stream, ChannelGeometry, Exec, FluidError, FluidState, MacField,
    ModifiedPoisson, Spectral,
};

/// Which map C: momenta → charges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CVariant {
    /// C = γR⁻¹A₀[μ₀]⁻¹ with R = 1 − γA₀[μ₀]⁻¹A₀*, solved exactly.
    Exact,
    /// The pointwise reduction γa₀P(ν)₁/Φ_γ, exact only for x-independent fields.
    Pointwise,
}

/// The control map c = Cν for momenta given by (vorticity, total momentum).
///
/// R acts mode by mode in x: R_m = 1 − γ diag(a₀) K_m diag(a₀), where K_m
/// sends f to the x-velocity of P(f dx). Each R_m is factored once.
#[derive(Debug, Clone)]
pub struct CMap {
    geom: ChannelGeometry,
    gamma: f64,
    a_half: Vec<f64>,
    phi_half: Vec<f64>,
    unit: ModifiedPoisson,
    lus: Vec<Option<LU<f64, nalgebra::Dyn, nalgebra::Dyn>>>,
}

impl CMap {
    pub fn new(geom: &ChannelGeometry, control: &ShearControl, exec: Exec) -> Result<Self, FluidError> {
        let pot = Potential::new(geom, control);
        let phi_half = control.phi_profile(&geom.ys_half());
        if let Some(min) = phi_half.iter().cloned().reduce(f64::min).filter(|m| !(*m > 0.0)) {
            return Err(FluidError::NotPositive(min));
        }
        let unit = ModifiedPoisson::unit(geom, exec);
        let ny = geom.ny;
        let gamma = control.gamma;
        let a = pot.a_half.clone();
        let lus = exec.map(geom.modes(), geom.modes() * ny * ny, |m| {
            if m == 0 || m == geom.nx / 2 {
                return None;
            }
            let k = projection_kernel(geom, m);
            let r = DMatrix::from_fn(ny, ny, |i, j| {
                let d = if i == j { 1.0 } else { 0.0 };
                d - gamma * a[i] * k[(i, j)] * a[j]
            });
            Some(r.lu())
        });
        Ok(Self { geom: *geom, gamma, a_half: a, phi_half, unit, lus })
    }

    pub fn spectral(&self) -> &Spectral {
        self.unit.spectral()
    }

    /// x-velocity of the divergence-free part of ν, on half rows.
    pub fn projected_u1(&self, omega: ArrayView2<f64>, momentum: f64) -> Array2<f64> {
        let psi = self.unit.solve(omega, momentum);
        velocity_from_stream(psi.view(), &self.geom, self.spectral()).u1
    }

    pub fn apply(&self, omega: ArrayView2<f64>, momentum: f64, variant: CVariant) -> Array2<f64> {
        let mut rhs = self.projected_u1(omega, momentum);
        for (j, mut row) in rhs.rows_mut().into_iter().enumerate() {
            row *= self.gamma * self.a_half[j];
        }
        if variant == CVariant::Pointwise {
            for (j, mut row) in rhs.rows_mut().into_iter().enumerate() {
                row /= self.phi_half[j];
            }
            return rhs;
        }
        let sp = self.spectral();
        let mut rh = sp.forward(rhs.view());
        let ny = self.geom.ny;
        for (m, lu) in self.lus.iter().enumerate() {
            match lu {
                Some(lu) => {
                    let re = DVector::from_fn(ny, |j, _| rh[[j, m]].re);
                    let im = DVector::from_fn(ny, |j, _| rh[[j, m]].im);
                    let (xr, xi) = (
                        lu.solve(&re).expect("R is invertible while Φ > 0"),
                        lu.solve(&im).expect("R is invertible while Φ > 0"),
                    );
                    for j in 0..ny {
                        rh[[j, m]] = Complex64::new(xr[j], xi[j]);
                    }
                }
                // On the mean R is multiplication by Φ; the Nyquist row is zero.
                None if m == 0 => {
                    for j in 0..ny {
                        rh[[j, 0]] /= self.phi_half[j];
                    }
                }
                None => {}
            }
        }
        sp.inverse(rh.view())
    }
}

// Matrix of f ↦ (P(f dx))₁ for Fourier mode m, through the stream function.
fn projection_kernel(geom: &ChannelGeometry, m: usize) -> DMatrix<f64> {
    let ny = geom.ny;
    let dy = geom.dy();
    let h2 = dy * dy;
    let k2 = geom.wavenumber(m).powi(2);
    let n = ny - 1;
    // Thomas factors of δ² − k² on interior nodes.
    let mut cp = vec![0.0; n];
    let mut den = vec![0.0; n];
    for j in 0..n {
        let b = -2.0 / h2 - k2;
        den[j] = if j == 0 { b } else { b - cp[j - 1] / h2 };
        cp[j] = (1.0 / h2) / den[j];
    }
    let mut out = DMatrix::zeros(ny, ny);
    for l in 0..ny {
        // curl(e_l dx) = −δ e_l on interior nodes J = 1..ny−1.
        let mut x = vec![0.0; n];
        for jj in 0..n {
            let node = jj + 1;
            let w = -((if node == l { 1.0 } else { 0.0 }) - (if node - 1 == l { 1.0 } else { 0.0 })) / dy;
            x[jj] = if jj == 0 { w / den[0] } else { (w - x[jj - 1] / h2) / den[jj] };
        }
        for jj in (0..n.saturating_sub(1)).rev() {
            let next = x[jj + 1];
            x[jj] -= cp[jj] * next;
        }
        let chi = |node: usize| if node == 0 || node == ny { 0.0 } else { x[node - 1] };
        for j in 0..ny {
            out[(j, l)] = -(chi(j + 1) - chi(j)) / dy;
        }
    }
    out
}

/// The charge-forced Lie-Poisson system.
///
/// ν evolves by ν̇ = −ad(u)*ν − X⋄q with (u, X) = [μ₀]⁻¹(ν, q), and the charge
/// by Dq/dt = −F(ν, q) with the force F built from C and the scalar T. The
/// quantity p = T⁻¹(q + Cν) is then advected, so p₀ = 0 keeps the charge on
/// the feedback q = −Cν. ν is carried as node vorticity plus the fixed total
/// momentum; q lives on half rows.
#[derive(Debug, Clone)]
pub struct ForcedModel {
    pub geom: ChannelGeometry,
    pub control: ShearControl,
    pub momentum: f64,
    pub cmap: CMap,
    unit: ModifiedPoisson,
    pot: Potential,
    t_half: Vec<f64>,
}

/// Tendencies and the intermediate fields of one evaluation.
#[derive(Debug, Clone)]
pub struct ForcedRhs {
    pub omega_dot: Array2<f64>,
    pub q_dot: Array2<f64>,
    pub force: Array2<f64>,
    pub u: MacField,
}

impl ForcedModel {
    pub fn new(geom: &ChannelGeometry, control: &ShearControl, exec: Exec) -> Result<Self, FluidError> {
        let cmap = CMap::new(geom, control, exec)?;
        Ok(Self {
            geom: *geom,
            control: control.clone(),
            momentum: equilibrium_momentum(geom),
            cmap,
            unit: ModifiedPoisson::unit(geom, exec),
            pot: Potential::new(geom, control),
            t_half: geom.ys_half().iter().map(|&y| control.t_factor(y)).collect(),
        })
    }

    fn sp(&self) -> &Spectral {
        self.unit.spectral()
    }

    /// The state with p = 0: q = −Cν.
    pub fn initial_state(&self, omega: Array2<f64>) -> FluidState {
        let c = self.cmap.apply(omega.view(), self.momentum, CVariant::Exact);
        FluidState { omega, q: Some(-c), u: None, t: 0.0 }
    }

    /// u = P(ν − a₀q dx).
    pub fn velocity(&self, omega: ArrayView2<f64>, q: ArrayView2<f64>) -> MacField {
        self.stream(omega, q).1
    }

    fn stream(&self, omega: ArrayView2<f64>, q: ArrayView2<f64>) -> (Array2<f64>, MacField) {
        let g = &self.geom;
        let dy = g.dy();
        let mut w = omega.to_owned();
        let mut total = 0.0;
        for j in 0..g.ny {
            for i in 0..g.nx {
                total += self.pot.a_half[j] * q[[j, i]];
            }
        }
        // curl(a₀q dx) = −∂_y(a₀q).
        for j in 1..g.ny {
            for i in 0..g.nx {
                w[[j, i]] += (self.pot.a_half[j] * q[[j, i]] - self.pot.a_half[j - 1] * q[[j - 1, i]]) / dy;
            }
        }
        let psi = self.unit.solve(w.view(), self.momentum - total * g.cell_area());
        let u = velocity_from_stream(psi.view(), g, self.sp());
        (psi, u)
    }

    // ρ^u s = u·∇s on half rows.
    fn rho(&self, u: &MacField, s: ArrayView2<f64>) -> Array2<f64> {
        -advect_half(u, s, &self.geom, self.sp())
    }

    fn scale_rows(&self, s: &Array2<f64>, f: impl Fn(usize) -> f64) -> Array2<f64> {
        let mut out = s.clone();
        for (j, mut row) in out.rows_mut().into_iter().enumerate() {
            row *= f(j);
        }
        out
    }

    pub fn rhs(&self, omega: ArrayView2<f64>, q: ArrayView2<f64>) -> ForcedRhs {
        let g = &self.geom;
        let (psi, u) = self.stream(omega, q);
        let mut x = q.to_owned();
        for (j, mut row) in x.rows_mut().into_iter().enumerate() {
            row.scaled_add(-self.pot.a_half[j], &u.u1.row(j));
        }
        let mut cd = curl(&diamond(x.view(), q, g, self.sp()), g, self.sp());
        let ny = g.ny;
        for i in 0..g.nx {
            cd[[0, i]] = 2.0 * cd[[1, i]] - cd[[2, i]];
            cd[[ny, i]] = 2.0 * cd[[ny - 1, i]] - cd[[ny - 2, i]];
        }
        let omega_dot = -jacobian(psi.view(), omega, g, self.sp().exec) - cd;

        // F = C(ν̇) + Tρ(T⁻¹Cν) + (Tρ T⁻¹ − ρ)q.
        let c = self.cmap.apply(omega, self.momentum, CVariant::Exact);
        let c_dot = self.cmap.apply(omega_dot.view(), 0.0, CVariant::Exact);
        let t = &self.t_half;
        let tinv_c = self.scale_rows(&c, |j| 1.0 / t[j]);
        let tinv_q = self.scale_rows(&q.to_owned(), |j| 1.0 / t[j]);
        let rho_q = self.rho(&u, q);
        let force = &c_dot + &self.scale_rows(&self.rho(&u, tinv_c.view()), |j| t[j])
            + self.scale_rows(&self.rho(&u, tinv_q.view()), |j| t[j])
            - &rho_q;
        let q_dot = -&rho_q - &force;
        ForcedRhs { omega_dot, q_dot, force, u }
    }

    /// p = T⁻¹(q + Cν).
    pub fn p_field(&self, omega: ArrayView2<f64>, q: ArrayView2<f64>) -> Array2<f64> {
        let c = self.cmap.apply(omega, self.momentum, CVariant::Exact);
        let s = &c + &q;
        self.scale_rows(&s, |j| 1.0 / self.t_half[j])
    }

    /// L² norm of p over the channel.
    pub fn p_norm(&self, state: &FluidState) -> f64 {
        let q = state.q.as_ref().expect("forced runs carry a charge");
        let p = self.p_field(state.omega.view(), q.view());
        (p.iter().map(|v| v * v).sum::<f64>() * self.geom.cell_area()).sqrt()
    }

    /// Classical RK4 on (ν, q).
    pub fn step(&self, state: &mut FluidState, dt: f64) -> Result<(), FluidError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(FluidError::TimeStep(dt));
        }
        let w = state.omega.clone();
        let q = state.q.clone().ok_or_else(|| FluidError::Shape("forced runs carry a charge".into()))?;
        let f = |w: &Array2<f64>, q: &Array2<f64>| {
            let r = self.rhs(w.view(), q.view());
            (r.omega_dot, r.q_dot)
        };
        let (a1, b1) = f(&w, &q);
        let (a2, b2) = f(&(&w + &(dt / 2.0 * &a1)), &(&q + &(dt / 2.0 * &b1)));
        let (a3, b3) = f(&(&w + &(dt / 2.0 * &a2)), &(&q + &(dt / 2.0 * &b2)));
        let (a4, b4) = f(&(&w + &(dt * &a3)), &(&q + &(dt * &b3)));
        state.omega = &w + &(dt / 6.0 * (&a1 + &(2.0 * &a2) + &(2.0 * &a3) + &a4));
        state.q = Some(&q + &(dt / 6.0 * (&b1 + &(2.0 * &b2) + &(2.0 * &b3) + &b4)));
        state.t += dt;
        if !state.omega.iter().all(|v| v.is_finite()) {
            return Err(FluidError::NonFinite(state.t));
        }
        Ok(())
    }
}

/// One forced step with a freshly assembled model; returns the new state and ‖p‖.
pub fn forced_evolution_step(
    state: &FluidState,
    control: &ShearControl,
    geom: &ChannelGeometry,
    dt: f64,
) -> Result<(FluidState, f64), FluidError> {
    let model = ForcedModel::new(geom, control, Exec::default())?;
    let mut s = state.clone();
    model.step(&mut s, dt)?;
    let p = model.p_norm(&s);
    Ok((s, p))
}

/// The force f = X⋄(Cν) felt by the flow at p = 0, with X = A_C[μ_C]⁻¹ν,
/// paired with a test field v.
pub fn force_pairing(
    cmap: &CMap,
    poisson: &ModifiedPoisson,
    a_half: &[f64],
    omega: ArrayView2<f64>,
    momentum: f64,
    v: &MacField,
    variant: CVariant,
) -> f64 {
    let g = poisson.geometry();
    let psi = poisson.solve(omega, momentum);
    let u = velocity_from_stream(psi.view(), g, poisson.spectral());
    let c = cmap.apply(omega, momentum, variant);
    let mut x = c.clone();
    for (j, mut row) in x.rows_mut().into_iter().enumerate() {
        row.scaled_add(a_half[j], &u.u1.row(j));
    }
    let f = diamond(x.view(), c.view(), g, poisson.spectral());
    mac_inner(&f, v, g)
}
