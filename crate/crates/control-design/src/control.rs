use std::f64::consts::PI;

use ndarray::Array2;

use crate::design::{constants_unchecked, default_margin, design_constants, kappa, BMap, DesignConstants};
use crate::{gamma_profile, omega_e, DesignError};

/// Shape of the potential a₀(y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum A0Profile {
    /// a₀ = b(ω_e(y)).
    Designed(BMap),
    Constant(f64),
}

/// γ together with a₀, the induced Φ_γ = 1 − γa₀² and its bounds on [0, Yπ].
#[derive(Debug, Clone, PartialEq)]
pub struct ShearControl {
    pub gamma: f64,
    pub profile: A0Profile,
    pub design: Option<DesignConstants>,
    /// Extension margin ε of b outside [0, 1].
    pub eps: f64,
    /// Channel width factor the bounds refer to.
    pub width: f64,
    pub phi_max: f64,
    pub phi_min: f64,
}

impl ShearControl {
    /// The control of the formal-stability theorem for the channel (X, Y).
    pub fn designed(x: f64, y: f64, gamma: f64) -> Result<Self, DesignError> {
        let d = design_constants(x, y)?;
        Ok(Self::from_design(d, y, gamma, false))
    }

    /// Same construction for widths below ½, with b rescaled by max ω_e.
    pub fn designed_rescaled(x: f64, y: f64, gamma: f64) -> Result<Self, DesignError> {
        if !(x > 0.0) {
            return Err(DesignError::Length(x));
        }
        if !(y > 0.0 && y < 1.0) {
            return Err(DesignError::Width(y));
        }
        let d = constants_unchecked(x, y);
        Ok(Self::from_design(d, y, gamma, y < 0.5))
    }

    fn from_design(d: DesignConstants, y: f64, gamma: f64, rescale: bool) -> Self {
        let eps = default_margin(&d);
        let mut b = BMap::new(&d, eps);
        if rescale {
            b.omega_scale = (y * PI).sin();
        }
        let mut c = ShearControl {
            gamma,
            profile: A0Profile::Designed(b),
            design: Some(d),
            eps,
            width: y,
            phi_max: 0.0,
            phi_min: 0.0,
        };
        c.update_bounds();
        c
    }

    pub fn constant(a0: f64, gamma: f64, y: f64) -> Self {
        let mut c = ShearControl {
            gamma,
            profile: A0Profile::Constant(a0),
            design: None,
            eps: 0.0,
            width: y,
            phi_max: 0.0,
            phi_min: 0.0,
        };
        c.update_bounds();
        c
    }

    /// The uncontrolled system (γ = 0, Φ ≡ 1).
    pub fn off(y: f64) -> Self {
        Self::constant(0.0, 0.0, y)
    }

    /// Replaces γ, keeping a₀.
    pub fn with_gamma(&self, gamma: f64) -> Self {
        let mut c = self.clone();
        c.gamma = gamma;
        c.update_bounds();
        c
    }

    fn update_bounds(&mut self) {
        let top = self.width * PI;
        let n = 10_000;
        let mut ys: Vec<f64> = (0..=n).map(|i| top * i as f64 / n as f64).collect();
        if PI / 2.0 <= top {
            ys.push(PI / 2.0);
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for y in ys {
            let p = self.phi(y);
            lo = lo.min(p);
            hi = hi.max(p);
        }
        self.phi_min = lo;
        self.phi_max = hi;
    }

    /// a₀ and its first two y-derivatives.
    pub fn a0_derivs(&self, y: f64) -> (f64, f64, f64) {
        match self.profile {
            A0Profile::Constant(a) => (a, 0.0, 0.0),
            A0Profile::Designed(b) => {
                let (w, w1, w2) = (omega_e(y), gamma_profile(y), -omega_e(y));
                let (v, v1, v2) = b.eval(w);
                (v, v1 * w1, v2 * w1 * w1 + v1 * w2)
            }
        }
    }

    pub fn a0(&self, y: f64) -> f64 {
        self.a0_derivs(y).0
    }

    /// Φ_γ(y) = 1 − γa₀(y)².
    pub fn phi(&self, y: f64) -> f64 {
        let a = self.a0(y);
        1.0 - self.gamma * a * a
    }

    /// T(y) = (1 + γ)/Φ_γ(y).
    pub fn t_factor(&self, y: f64) -> f64 {
        (1.0 + self.gamma) / self.phi(y)
    }

    /// Φ_γ as a function of vorticity, for the designed profile.
    pub fn phi_of_omega(&self, w: f64) -> f64 {
        let a = match self.profile {
            A0Profile::Constant(a) => a,
            A0Profile::Designed(b) => b.b(w),
        };
        1.0 - self.gamma * a * a
    }

    /// Samples of a₀ on the given y values.
    pub fn a0_profile(&self, ys: &[f64]) -> Vec<f64> {
        ys.iter().map(|&y| self.a0(y)).collect()
    }

    pub fn phi_profile(&self, ys: &[f64]) -> Vec<f64> {
        ys.iter().map(|&y| self.phi(y)).collect()
    }

    /// Fails if Φ_γ ≤ 0 somewhere on the channel.
    pub fn check_positive(&self) -> Result<(), DesignError> {
        if self.phi_min > 0.0 {
            Ok(())
        } else {
            Err(DesignError::NotPositive(1.0 - self.phi_min))
        }
    }

    /// κ for the current margin.
    pub fn kappa(&self) -> Option<f64> {
        self.design.map(|d| kappa(&d, self.eps))
    }
}

/// Feedback q = −γa₀u₁/Φ_γ, row by row (`ys[j]` is the y of row j).
pub fn apply_c(u1: &Array2<f64>, ys: &[f64], control: &ShearControl) -> Result<Array2<f64>, DesignError> {
    if u1.nrows() != ys.len() {
        return Err(DesignError::Rows {
            rows: u1.nrows(),
            expected: ys.len(),
        });
    }
    let mut q = Array2::zeros(u1.dim());
    for (j, &y) in ys.iter().enumerate() {
        let phi = control.phi(y);
        if !(phi > 0.0) {
            return Err(DesignError::NotPositive(1.0 - phi));
        }
        let f = -control.gamma * control.a0(y) / phi;
        for (qv, uv) in q.row_mut(j).iter_mut().zip(u1.row(j)) {
            *qv = f * uv;
        }
    }
    Ok(q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub lhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub conditions: Vec<Condition>,
    pub phi_max: f64,
    pub phi_min: f64,
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// Positivity (max γa₀² < 1), no-inflection (γ > 0 and a₀a₀″ ≥ 0 on the grid)
/// and the norm condition Φ̄X² + (Φ̄/Φ̲)Y² < 1.
pub fn condition_report(control: &ShearControl, x: f64, y: f64, ny: usize) -> ConditionReport {
    let top = y * PI;
    let dy = top / ny as f64;
    let ys: Vec<f64> = (0..=ny).map(|j| j as f64 * dy).collect();
    let a = control.a0_profile(&ys);
    let ga2 = 1.0 - control.phi_min;
    let mut min_curv = f64::INFINITY;
    for j in 1..ny {
        let d2 = (a[j + 1] - 2.0 * a[j] + a[j - 1]) / (dy * dy);
        min_curv = min_curv.min(a[j] * d2);
    }
    let nd = control.phi_max * x * x + control.phi_max / control.phi_min * y * y;
    ConditionReport {
        conditions: vec![
            Condition {
                name: "positivity",
                lhs: ga2,
                pass: ga2 < 1.0,
            },
            Condition {
                name: "no_inflection",
                lhs: min_curv,
                pass: control.gamma > 0.0 && min_curv >= -1e-10,
            },
            Condition {
                name: "nd_condition",
                lhs: nd,
                pass: control.phi_min > 0.0 && nd < 1.0,
            },
        ],
        phi_max: control.phi_max,
        phi_min: control.phi_min,
    }
}

/// A-priori bound ∫ω² ≤ 2Φ̄₁|Ĥ₂(ν₀)| / (r − κΦ̄₁) on the perturbation enstrophy.
pub fn enstrophy_bound(control: &ShearControl, h2_initial: f64) -> Result<f64, DesignError> {
    let d = control.design.ok_or(DesignError::NotDesigned)?;
    let p = d.phi_max();
    let kphi = kappa(&d, control.eps) * p;
    if kphi >= d.r {
        return Err(DesignError::Margin { kphi, r: d.r });
    }
    Ok(2.0 * p * h2_initial.abs() / (d.r - kphi))
}
