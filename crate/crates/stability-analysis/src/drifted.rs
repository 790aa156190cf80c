use std::f64::consts::PI;

use channel_fluid::ChannelGeometry;
use control_design::quad::gauss5;
use control_design::ShearControl;
use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;

use crate::StabilityError;

// Sub-intervals per grid cell when integrating Φ^{-1/2}.
const PIECES: usize = 8;

/// The channel in the coordinate z(y) = ∫₀ʸ Φ_γ^{-1/2}, in which the modified
/// Laplacian becomes the drifted Laplacian Δ_g = Δ − ⟨∇g, ∇⟩, g = −½ log Φ̃_γ.
#[derive(Debug, Clone)]
pub struct DriftedSetup {
    pub control: ShearControl,
    pub x_len: f64,
    pub y_len: f64,
    /// y samples (node rows of the channel grid) and z at those samples.
    pub ys: Vec<f64>,
    pub z_of_y: Vec<f64>,
    /// Z_γ = z(Yπ).
    pub z_total: f64,
    /// Lower bound K of Ric + Hess g; zero when g is convex in z.
    pub k: f64,
    /// min over the samples of ∂²_z g.
    pub min_g_zz: f64,
}

pub fn drifted_setup(control: &ShearControl, geom: &ChannelGeometry) -> Result<DriftedSetup, StabilityError> {
    let ys = geom.ys();
    for &y in &ys {
        let p = control.phi(y);
        if !(p > 0.0) {
            return Err(StabilityError::Domain(format!("Φ_γ({y}) = {p} is not positive")));
        }
    }
    let mut z = vec![0.0; ys.len()];
    for j in 1..ys.len() {
        z[j] = z[j - 1] + integral(control, ys[j - 1], ys[j]);
    }
    let min_g_zz = ys.iter().map(|&y| g_zz(control, y)).fold(f64::INFINITY, f64::min);
    Ok(DriftedSetup {
        control: control.clone(),
        x_len: geom.x_len,
        y_len: geom.y_len,
        z_total: *z.last().unwrap(),
        z_of_y: z,
        ys,
        k: min_g_zz.min(0.0),
        min_g_zz,
    })
}

fn integral(control: &ShearControl, a: f64, b: f64) -> f64 {
    let h = (b - a) / PIECES as f64;
    (0..PIECES)
        .map(|i| gauss5(|s| control.phi(s).powf(-0.5), a + i as f64 * h, a + (i + 1) as f64 * h))
        .sum()
}

/// ∂²_z g at the point z(y): γ(a₀′² + a₀a₀″) + γ²a₀²a₀′²/Φ_γ.
pub fn g_zz(control: &ShearControl, y: f64) -> f64 {
    let (a, a1, a2) = control.a0_derivs(y);
    let gam = control.gamma;
    gam * (a1 * a1 + a * a2) + gam * gam * a * a * a1 * a1 / control.phi(y)
}

impl DriftedSetup {
    /// z at an arbitrary y ∈ [0, Yπ].
    pub fn z(&self, y: f64) -> f64 {
        let j = self.cell(y);
        self.z_of_y[j] + integral(&self.control, self.ys[j], y)
    }

    // Index of the sample at or below y.
    fn cell(&self, y: f64) -> usize {
        let n = self.ys.len() - 1;
        let h = self.ys[n] / n as f64;
        ((y / h).floor().max(0.0) as usize).min(n - 1)
    }

    /// Inverse of z(y), by Newton from linear interpolation of the samples.
    pub fn y(&self, z: f64) -> f64 {
        let j = match self.z_of_y.iter().position(|&v| v > z) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => self.ys.len() - 2,
        };
        let (z0, z1) = (self.z_of_y[j], self.z_of_y[j + 1]);
        let mut y = self.ys[j] + (self.ys[j + 1] - self.ys[j]) * (z - z0) / (z1 - z0);
        for _ in 0..50 {
            let step = (self.z(y) - z) * self.control.phi(y).sqrt();
            y -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        y
    }

    /// g(z) = −½ log Φ_γ(y(z)).
    pub fn g(&self, z: f64) -> f64 {
        -0.5 * self.control.phi(self.y(z)).ln()
    }

    /// Square diameter π²X² + Z_γ² of the transformed rectangle.
    pub fn diameter_sq(&self) -> f64 {
        (PI * self.x_len).powi(2) + self.z_total.powi(2)
    }

    /// The lower bound π²/(π²X² + Z_γ²) for λ₁.
    pub fn lambda1_bound(&self) -> f64 {
        fll_bound(self.diameter_sq().sqrt(), 0.0)
    }
}

/// sup over s ∈ (0, 1) of 4s(1−s)π²/d² + sK.
pub fn fll_bound(d: f64, k: f64) -> f64 {
    assert!(d > 0.0, "diameter must be positive");
    let a = PI * PI / (d * d);
    // Stationary point of 4a s(1 − s) + Ks, clamped to the closed interval.
    let s = (0.5 + k / (8.0 * a)).clamp(0.0, 1.0);
    4.0 * a * s * (1.0 - s) + k * s
}

/// Discretisation of −Δ_g with Dirichlet walls on [0, Xπ] × [0, Z_γ].
#[derive(Debug, Clone)]
pub struct DriftedOperator {
    pub n: usize,
    pub hx: f64,
    pub hz: f64,
    /// e^{−g} at the interior z nodes and at the n half nodes.
    pub weight: Vec<f64>,
    pub weight_half: Vec<f64>,
}

impl DriftedOperator {
    /// Uniform grid with n intervals in each direction.
    pub fn new(setup: &DriftedSetup, n: usize) -> Result<Self, StabilityError> {
        if n < 4 {
            return Err(StabilityError::Domain(format!("resolution {n} too small")));
        }
        let hz = setup.z_total / n as f64;
        let w = |z: f64| (-setup.g(z)).exp();
        Ok(Self {
            n,
            hx: PI * setup.x_len / n as f64,
            hz,
            weight: (1..n).map(|i| w(i as f64 * hz)).collect(),
            weight_half: (0..n).map(|i| w((i as f64 + 0.5) * hz)).collect(),
        })
    }

    /// Smallest eigenvalue of −∂ₓ² with Dirichlet ends.
    pub fn lambda_x(&self) -> f64 {
        let l = self.hx * self.n as f64;
        4.0 / (self.hx * self.hx) * (PI * self.hx / (2.0 * l)).sin().powi(2)
    }

    /// W^{-1/2} A W^{-1/2} for the z part, A f = −(e^{−g} f′)′.
    fn z_matrix(&self) -> DMatrix<f64> {
        let m = self.n - 1;
        let h2 = self.hz * self.hz;
        DMatrix::from_fn(m, m, |i, j| {
            let s = 1.0 / (self.weight[i] * self.weight[j]).sqrt();
            if i == j {
                (self.weight_half[i] + self.weight_half[i + 1]) / h2 * s
            } else if j == i + 1 {
                -self.weight_half[i + 1] / h2 * s
            } else if i == j + 1 {
                -self.weight_half[i] / h2 * s
            } else {
                0.0
            }
        })
    }

    /// −Δ_g φ on the interior grid, rows in z and columns in x.
    pub fn apply(&self, f: &Array2<f64>) -> Array2<f64> {
        let m = self.n - 1;
        assert_eq!(f.dim(), (m, m), "trial fields live on the interior grid");
        let (hx2, hz2) = (self.hx * self.hx, self.hz * self.hz);
        let at = |i: isize, j: isize| if i < 0 || j < 0 || i >= m as isize || j >= m as isize { 0.0 } else { f[[i as usize, j as usize]] };
        Array2::from_shape_fn((m, m), |(i, j)| {
            let (ii, jj) = (i as isize, j as isize);
            let c = f[[i, j]];
            let lx = (2.0 * c - at(ii, jj - 1) - at(ii, jj + 1)) / hx2;
            let lz = (self.weight_half[i + 1] * (c - at(ii + 1, jj)) + self.weight_half[i] * (c - at(ii - 1, jj)))
                / (hz2 * self.weight[i]);
            lx + lz
        })
    }

    /// ∫ a b e^{−g} dx dz.
    pub fn inner(&self, a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        let mut t = 0.0;
        for i in 0..a.nrows() {
            t += self.weight[i] * a.row(i).dot(&b.row(i));
        }
        t * self.hx * self.hz
    }
}

/// First Dirichlet eigenpair of −Δ_g, computed by separation of variables.
#[derive(Debug, Clone)]
pub struct Lambda1 {
    pub value: f64,
    pub lambda_x: f64,
    pub mu_z: f64,
    /// z profile of the eigenfunction at the interior nodes, unit weighted norm.
    pub profile: Vec<f64>,
    pub op: DriftedOperator,
}

pub fn lambda1_drifted(setup: &DriftedSetup, resolution: usize) -> Result<Lambda1, StabilityError> {
    let op = DriftedOperator::new(setup, resolution)?;
    let eig = SymmetricEigen::new(op.z_matrix());
    let (k, &mu) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| StabilityError::Domain("empty operator".into()))?;
    // Undo the symmetrising scale and fix the sign.
    let v = eig.eigenvectors.column(k);
    let sign = if v.sum() < 0.0 { -1.0 } else { 1.0 };
    let profile: Vec<f64> = v.iter().zip(&op.weight).map(|(x, w)| sign * x / w.sqrt()).collect();
    let lambda_x = op.lambda_x();
    Ok(Lambda1 { value: lambda_x + mu, lambda_x, mu_z: mu, profile, op })
}

impl Lambda1 {
    /// The eigenfunction sin(x/X) f(z) on the interior grid (rows z, columns x).
    pub fn eigenfunction(&self) -> Array2<f64> {
        let m = self.op.n - 1;
        let l = self.op.hx * self.op.n as f64;
        Array2::from_shape_fn((m, m), |(i, j)| {
            self.profile[i] * (PI * (j + 1) as f64 * self.op.hx / l).sin()
        })
    }
}

/// Outcome of the reverse Poincaré inequality ∫(Δ_gφ)² e^{−g} ≥ λ₁ ∫|∇φ|² e^{−g}
/// on a set of trial fields.
#[derive(Debug, Clone)]
pub struct ReversePoincare {
    pub lambda1: f64,
    /// (∫(Δ_gφ)² e^{−g}, λ₁∫|∇φ|² e^{−g}) per trial.
    pub trials: Vec<(f64, f64)>,
}

impl ReversePoincare {
    pub fn holds(&self, tol: f64) -> bool {
        self.trials.iter().all(|&(l, r)| l >= r * (1.0 - tol))
    }

    /// Largest relative gap (lhs − rhs)/rhs.
    pub fn gaps(&self) -> Vec<f64> {
        self.trials.iter().map(|&(l, r)| (l - r) / r).collect()
    }
}

/// Checks the inequality for each trial field. The Dirichlet energy ∫|∇φ|² e^{−g}
/// is taken as ⟨φ, −Δ_gφ⟩, which holds exactly for the discrete operator.
pub fn reverse_poincare_check(lambda1: &Lambda1, fields: &[Array2<f64>]) -> Result<ReversePoincare, StabilityError> {
    let op = &lambda1.op;
    let m = op.n - 1;
    let mut trials = Vec::with_capacity(fields.len());
    for f in fields {
        if f.dim() != (m, m) {
            return Err(StabilityError::Shape(format!("trial field {:?}, expected {:?}", f.dim(), (m, m))));
        }
        let lf = op.apply(f);
        trials.push((op.inner(&lf, &lf), lambda1.value * op.inner(f, &lf)));
    }
    Ok(ReversePoincare { lambda1: lambda1.value, trials })
}
