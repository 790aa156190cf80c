use control_design::ShearControl;
use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use crate::equilibrium::{equilibrium_fields, equilibrium_momentum, seeded_perturbation};
use crate::spectral::{row_means, RowShift};
use crate::{jacobian, velocity_from_stream, ChannelGeometry, Exec, FluidError, MacField, ModifiedPoisson};

/// Fields carried by a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    /// Vorticity on node rows.
    pub omega: Array2<f64>,
    /// Charge, when the run evolves one.
    pub q: Option<Array2<f64>>,
    /// Velocity, for velocity-form runs.
    pub u: Option<MacField>,
    pub t: f64,
}

impl FluidState {
    pub fn from_vorticity(omega: Array2<f64>) -> Self {
        Self { omega, q: None, u: None, t: 0.0 }
    }

    pub fn equilibrium(geom: &ChannelGeometry) -> Self {
        Self::from_vorticity(equilibrium_fields(geom).omega_field(geom.nx))
    }

    /// ω_e plus the seeded perturbation of maximum amplitude `amp`.
    pub fn perturbed(geom: &ChannelGeometry, amp: f64, seed: u64) -> Self {
        let mut s = Self::equilibrium(geom);
        s.omega += &seeded_perturbation(geom, amp, seed);
        s
    }
}

/// Time integrator of the vorticity form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Classical RK4 on ω̇ = −J(ψ, ω).
    Rk4,
    /// RK4 in the frame of the mean flow (Lawson integrating factor).
    ///
    /// The x-mean velocity U(y), frozen at the start of each step, is
    /// integrated exactly in Fourier space. This removes the time-step limit
    /// of the strong controlled shear and keeps the modified energy and the
    /// Casimirs accurate over long runs.
    Lawson,
}

/// What a step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub substeps: usize,
    /// Courant number of the requested step.
    pub cfl: f64,
    /// The Courant number exceeded the limit.
    pub cfl_warning: bool,
}

/// Closed-loop vorticity evolution ω̇ = −u_C·∇ω with Δ^Cψ_C = ω, u_C = ∇ˢψ_C.
#[derive(Debug, Clone)]
pub struct VorticityModel {
    pub geom: ChannelGeometry,
    pub control: ShearControl,
    pub poisson: ModifiedPoisson,
    /// Total momentum ∫ν₁, conserved by the flow.
    pub momentum: f64,
    pub scheme: Scheme,
    /// Courant limit above which a step is split.
    pub max_cfl: f64,
    pub substep: bool,
}

impl VorticityModel {
    pub fn new(geom: &ChannelGeometry, control: &ShearControl, scheme: Scheme, exec: Exec) -> Result<Self, FluidError> {
        Ok(Self {
            geom: *geom,
            control: control.clone(),
            poisson: ModifiedPoisson::from_control(geom, control, exec)?,
            momentum: equilibrium_momentum(geom),
            scheme,
            max_cfl: 0.5,
            substep: true,
        })
    }

    pub fn exec(&self) -> Exec {
        self.poisson.spectral().exec
    }

    pub fn stream(&self, omega: ArrayView2<f64>) -> Array2<f64> {
        self.poisson.solve(omega, self.momentum)
    }

    pub fn velocity(&self, omega: ArrayView2<f64>) -> MacField {
        velocity_from_stream(self.stream(omega).view(), &self.geom, self.poisson.spectral())
    }

    /// −J(ψ_C, ω).
    pub fn rhs(&self, omega: ArrayView2<f64>) -> Array2<f64> {
        let psi = self.stream(omega);
        -jacobian(psi.view(), omega, &self.geom, self.exec())
    }

    /// The same tendency with the mean flow split off, and the mean velocity U(y).
    ///
    /// ω̇ = −U∂ₓω̃ − W∂ₓψ̃ − J(ψ̃, ω̃) with W = ∂_y ω̄ and tildes the deviations
    /// from the x-mean.
    pub fn split_rhs(&self, omega: ArrayView2<f64>) -> (Array2<f64>, Vec<f64>) {
        let parts = self.split_parts(omega);
        (parts.rhs, parts.u_mean)
    }

    fn split_parts(&self, omega: ArrayView2<f64>) -> SplitParts {
        let g = &self.geom;
        let (ny, dy) = (g.ny, g.dy());
        let sp = self.poisson.spectral();
        let mut wh = sp.forward(omega);
        let ph = self.poisson.solve_hat(wh.view(), self.momentum);
        let nxf = g.nx as f64;
        let pbar: Vec<f64> = (0..=ny).map(|j| ph[[j, 0]].re / nxf).collect();
        let wbar: Vec<f64> = (0..=ny).map(|j| wh[[j, 0]].re / nxf).collect();
        let mut u = vec![0.0; ny + 1];
        for j in 1..ny {
            u[j] = -(pbar[j + 1] - pbar[j - 1]) / (2.0 * dy);
        }
        u[0] = -(pbar[1] - pbar[0]) / dy;
        u[ny] = -(pbar[ny] - pbar[ny - 1]) / dy;
        let mut w = vec![0.0; ny + 1];
        for j in 1..ny {
            w[j] = (wbar[j + 1] - wbar[j - 1]) / (2.0 * dy);
        }
        w[0] = (-3.0 * wbar[0] + 4.0 * wbar[1] - wbar[2]) / (2.0 * dy);
        w[ny] = (3.0 * wbar[ny] - 4.0 * wbar[ny - 1] + wbar[ny - 2]) / (2.0 * dy);

        let mut pt_h = ph.clone();
        pt_h.column_mut(0).fill(Complex64::new(0.0, 0.0));
        wh.column_mut(0).fill(Complex64::new(0.0, 0.0));
        let pt = sp.inverse(pt_h.view());
        let wt = sp.inverse(wh.view());
        sp.dx_hat(&mut wh);
        sp.dx_hat(&mut pt_h);
        let dwt = sp.inverse(wh.view());
        let dpt = sp.inverse(pt_h.view());
        let mut rhs = -jacobian(pt.view(), wt.view(), g, self.exec());
        for j in 0..=ny {
            for i in 0..g.nx {
                rhs[[j, i]] -= u[j] * dwt[[j, i]] + w[j] * dpt[[j, i]];
            }
        }
        SplitParts { rhs, u_mean: u, dwt }
    }

    /// Largest velocity the step size has to resolve.
    ///
    /// For `Lawson` the mean flow is integrated exactly, so only the departure
    /// from it counts; the equilibrium speed scale 1 is kept as a floor.
    pub fn advective_speed(&self, omega: ArrayView2<f64>) -> f64 {
        let u = self.velocity(omega);
        match self.scheme {
            Scheme::Rk4 => u.max_abs(),
            Scheme::Lawson => {
                let mut m: f64 = 1.0;
                let means1 = row_means(u.u1.view());
                for (j, row) in u.u1.rows().into_iter().enumerate() {
                    m = row.iter().fold(m, |a, v| a.max((v - means1[j]).abs()));
                }
                m.max(u.u2.iter().fold(0.0f64, |a, v| a.max(v.abs())))
            }
        }
    }

    pub fn cfl(&self, omega: ArrayView2<f64>, dt: f64) -> f64 {
        self.advective_speed(omega) * dt / self.geom.dx().min(self.geom.dy())
    }

    /// Step size for Courant number `cfl`.
    pub fn stable_dt(&self, omega: ArrayView2<f64>, cfl: f64) -> f64 {
        cfl * self.geom.dx().min(self.geom.dy()) / self.advective_speed(omega)
    }

    /// Advances by `dt`, splitting the step if the Courant number exceeds `max_cfl`.
    pub fn step(&self, state: &mut FluidState, dt: f64) -> Result<StepInfo, FluidError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(FluidError::TimeStep(dt));
        }
        let cfl = self.cfl(state.omega.view(), dt);
        let warn = cfl > self.max_cfl;
        let n = if warn && self.substep { (cfl / self.max_cfl).ceil() as usize } else { 1 };
        let h = dt / n as f64;
        for _ in 0..n {
            state.omega = match self.scheme {
                Scheme::Rk4 => self.rk4(state.omega.view(), h),
                Scheme::Lawson => self.lawson(state.omega.view(), h),
            };
        }
        state.t += dt;
        if !state.omega.iter().all(|v| v.is_finite()) {
            return Err(FluidError::NonFinite(state.t));
        }
        Ok(StepInfo { substeps: n, cfl, cfl_warning: warn })
    }

    fn rk4(&self, w: ArrayView2<f64>, dt: f64) -> Array2<f64> {
        let k1 = self.rhs(w);
        let k2 = self.rhs((&w + &(dt / 2.0 * &k1)).view());
        let k3 = self.rhs((&w + &(dt / 2.0 * &k2)).view());
        let k4 = self.rhs((&w + &(dt * &k3)).view());
        &w + &(dt / 6.0 * (&k1 + &(2.0 * &k2) + &(2.0 * &k3) + &k4))
    }

    // Nonlinear part in the frame of U₀: the split tendency plus U₀∂ₓω̃.
    fn lawson_n(&self, w: ArrayView2<f64>, u0: &[f64]) -> Array2<f64> {
        let mut p = self.split_parts(w);
        for (j, mut row) in p.rhs.rows_mut().into_iter().enumerate() {
            row.scaled_add(u0[j], &p.dwt.row(j));
        }
        p.rhs
    }

    fn lawson(&self, w: ArrayView2<f64>, dt: f64) -> Array2<f64> {
        let first = self.split_parts(w);
        let u0 = first.u_mean;
        let mut k1 = first.rhs;
        for (j, mut row) in k1.rows_mut().into_iter().enumerate() {
            row.scaled_add(u0[j], &first.dwt.row(j));
        }
        let half = RowShift::new(self.poisson.spectral(), &u0, dt / 2.0);
        let full = half.doubled();
        let w_half = half.apply(w);
        let w_full = full.apply(w);
        let k2 = self.lawson_n((&w_half + &(dt / 2.0 * &half.apply(k1.view()))).view(), &u0);
        let k3 = self.lawson_n((&w_half + &(dt / 2.0 * &k2)).view(), &u0);
        let k4 = self.lawson_n((&w_full + &(dt * &half.apply(k3.view()))).view(), &u0);
        let mid = half.apply((&k2 + &k3).view());
        &w_full + &(dt / 6.0 * (&full.apply(k1.view()) + &(2.0 * &mid) + &k4))
    }
}

struct SplitParts {
    rhs: Array2<f64>,
    u_mean: Vec<f64>,
    dwt: Array2<f64>,
}

/// One closed-loop step with a freshly assembled model (momentum of the equilibrium).
pub fn closed_loop_step(
    state: &FluidState,
    control: &ShearControl,
    geom: &ChannelGeometry,
    dt: f64,
) -> Result<(FluidState, StepInfo), FluidError> {
    let scheme = if control.gamma == 0.0 { Scheme::Rk4 } else { Scheme::Lawson };
    let model = VorticityModel::new(geom, control, scheme, Exec::default())?;
    let mut s = state.clone();
    let info = model.step(&mut s, dt)?;
    Ok((s, info))
}
