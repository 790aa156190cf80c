use crate::dynamics::{controlled_rhs, free_rhs};
use crate::params::{ControlGainK, RigidState, RotorParams};
use crate::RigidError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Rk4,
    /// Heun's second-order method; mainly for comparison.
    Heun,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub pi: [f64; 3],
    pub q: f64,
    pub energy: f64,
    pub casimir: f64,
    pub p_k: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    /// Largest `‖Π − target‖` over the samples.
    pub fn max_deviation(&self, target: [f64; 3]) -> f64 {
        self.samples
            .iter()
            .map(|s| dist(s.pi, target))
            .fold(0.0, f64::max)
    }

    /// Largest |f(sample) − f(first sample)|.
    pub fn max_drift(&self, f: impl Fn(&Sample) -> f64) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        let f0 = f(first);
        self.samples
            .iter()
            .map(|s| (f(s) - f0).abs())
            .fold(0.0, f64::max)
    }
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn norm2(a: [f64; 3]) -> f64 {
    a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
}

/// Free energy H₀ = ½⟨(Π, q), (μ₀ᴾ)⁻¹(Π, q)⟩.
pub fn free_energy(s: &RigidState, p: &RotorParams) -> f64 {
    let l = p.lambda();
    0.5 * (s.pi[0].powi(2) / l[0]
        + s.pi[1].powi(2) / l[1]
        + (s.pi[2] - s.q).powi(2) / p.big_i3()
        + s.q * s.q / p.i3())
}

/// Controlled energy h_C = ½⟨(Π, p̃_k), (μ_kᴾ)⁻¹(Π, p̃_k)⟩.
pub fn controlled_energy(pi: [f64; 3], g: &ControlGainK, p: &RotorParams) -> f64 {
    let l = p.lambda();
    let one_k = 1.0 - g.k;
    let pt = g.p_tilde(p);
    let inertia_c = p.i3() / g.phi_k(p);
    0.5 * (pi[0].powi(2) / l[0]
        + pi[1].powi(2) / l[1]
        + (one_k * pi[2] - g.p_k).powi(2) / (one_k * p.big_i3())
        + pt * pt / inertia_c)
}

fn axpy(a: [f64; 3], s: f64, b: [f64; 3]) -> [f64; 3] {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

fn step(f: &impl Fn([f64; 3]) -> [f64; 3], y: [f64; 3], dt: f64, scheme: Scheme) -> [f64; 3] {
    match scheme {
        Scheme::Rk4 => {
            let k1 = f(y);
            let k2 = f(axpy(y, 0.5 * dt, k1));
            let k3 = f(axpy(y, 0.5 * dt, k2));
            let k4 = f(axpy(y, dt, k3));
            [0, 1, 2].map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        }
        Scheme::Heun => {
            let k1 = f(y);
            let k2 = f(axpy(y, dt, k1));
            [0, 1, 2].map(|i| y[i] + 0.5 * dt * (k1[i] + k2[i]))
        }
    }
}

/// Integrates the free (`gain = None`) or closed-loop system up to `t_end`,
/// recording every `stride`-th step.
pub fn integrate(
    state: RigidState,
    gain: Option<ControlGainK>,
    params: &RotorParams,
    dt: f64,
    t_end: f64,
    stride: usize,
    scheme: Scheme,
) -> Result<Trajectory, RigidError> {
    if !(dt > 0.0) {
        return Err(RigidError::TimeStep(dt));
    }
    if let Some(g) = gain {
        if g.k == 1.0 {
            return Err(RigidError::GainIsOne);
        }
    }
    let stride = stride.max(1);
    let n = (t_end / dt).round() as usize;
    let q_free = state.q;
    let record = |t: f64, pi: [f64; 3]| match gain {
        None => {
            let s = RigidState { pi, q: q_free };
            Sample {
                t,
                pi,
                q: q_free,
                energy: free_energy(&s, params),
                casimir: norm2(pi),
                p_k: q_free,
            }
        }
        Some(g) => Sample {
            t,
            pi,
            q: g.p_k + g.k * pi[2],
            energy: controlled_energy(pi, &g, params),
            casimir: norm2(pi),
            p_k: g.p_k,
        },
    };
    let f = |pi: [f64; 3]| match gain {
        None => free_rhs(&RigidState { pi, q: q_free }, params).0,
        Some(g) => controlled_rhs(pi, &g, params),
    };
    let mut traj = Trajectory {
        samples: Vec::with_capacity(n / stride + 2),
    };
    let mut pi = state.pi;
    traj.samples.push(record(0.0, pi));
    for s in 1..=n {
        pi = step(&f, pi, dt, scheme);
        if !pi.iter().all(|v| v.is_finite()) {
            return Err(RigidError::NonFinite {
                step: s,
                t: s as f64 * dt,
            });
        }
        if s % stride == 0 || s == n {
            let mut rec = record(s as f64 * dt, pi);
            if let Some(g) = gain {
                // The rotor momentum follows the feedback, so p_k = q − kΠ₃ is
                // evaluated from the recorded q.
                rec.p_k = rec.q - g.k * pi[2];
            }
            traj.samples.push(rec);
        }
    }
    Ok(traj)
}
