use std::f64::consts::PI;

use channel_fluid::{velocity_from_stream, ChannelGeometry, Exec, MacField, ModifiedPoisson};
use control_design::ShearControl;
use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;

use crate::eigen::{extremes, Extremes};
use crate::StabilityError;

/// Second variation of the energy-Casimir functional at the shear equilibrium,
/// over vorticity perturbations on the interior node rows that keep the total
/// momentum fixed:
///
/// Q(δω) = ⟨δν, [μ_C]⁻¹δν⟩ − ∫ Φ_γ⁻¹ (δω)².
///
/// The equilibrium depends on y only, so Q is block diagonal in the real
/// Fourier basis of x; `blocks[m]` is the block of mode m in the orthonormal
/// basis e_j(y)·c_m(x). For 0 < m < Nx/2 the sine block equals the cosine one.
#[derive(Debug, Clone)]
pub struct SecondVariation {
    pub geom: ChannelGeometry,
    pub blocks: Vec<DMatrix<f64>>,
    poisson: ModifiedPoisson,
    inv_phi: Vec<f64>,
}

/// Assembles the mode blocks through the modified Poisson solve; one column per
/// interior row, modes in parallel.
pub fn second_variation_matrix(
    control: &ShearControl,
    geom: &ChannelGeometry,
    exec: Exec,
) -> Result<SecondVariation, StabilityError> {
    let poisson = ModifiedPoisson::from_control(geom, control, Exec::Sequential)?;
    let inv_phi: Vec<f64> = (1..geom.ny).map(|j| 1.0 / control.phi(geom.y(j))).collect();
    let modes = geom.nx / 2 + 1;
    let n = geom.ny - 1;
    let blocks = exec.map(modes, modes * n * geom.nx * geom.ny, |m| {
        let cols: Vec<MacField> = (0..n)
            .map(|c| {
                let mut w = Array2::zeros((geom.ny + 1, geom.nx));
                for i in 0..geom.nx {
                    w[[c + 1, i]] = mode_shape(geom, m, i);
                }
                velocity(&poisson, &w)
            })
            .collect();
        gram(geom, &poisson, &cols, &inv_phi)
    });
    Ok(SecondVariation { geom: *geom, blocks, poisson, inv_phi })
}

// Orthonormal real Fourier basis: √(2/Nx) cos(kx) inside, 1/√Nx for the mean
// and the Nyquist alternation.
fn mode_shape(geom: &ChannelGeometry, m: usize, i: usize) -> f64 {
    let nx = geom.nx as f64;
    if m == 0 {
        1.0 / nx.sqrt()
    } else if m == geom.nx / 2 {
        if i % 2 == 0 {
            1.0 / nx.sqrt()
        } else {
            -1.0 / nx.sqrt()
        }
    } else {
        (2.0 / nx).sqrt() * (2.0 * PI * (m * i) as f64 / nx).cos()
    }
}

fn velocity(poisson: &ModifiedPoisson, w: &Array2<f64>) -> MacField {
    let psi = poisson.solve(w.view(), 0.0);
    velocity_from_stream(psi.view(), poisson.geometry(), poisson.spectral())
}

// Kinetic inner product ΣΦu₁v₁ + Σw u₂v₂ (cell area included).
fn kinetic(geom: &ChannelGeometry, phi_half: &[f64], a: &MacField, b: &MacField) -> f64 {
    let mut s = 0.0;
    for j in 0..geom.ny {
        s += phi_half[j] * a.u1.row(j).dot(&b.u1.row(j));
    }
    for j in 0..=geom.ny {
        s += geom.weight(j) * a.u2.row(j).dot(&b.u2.row(j));
    }
    s * geom.cell_area()
}

fn gram(geom: &ChannelGeometry, poisson: &ModifiedPoisson, cols: &[MacField], inv_phi: &[f64]) -> DMatrix<f64> {
    let n = cols.len();
    let mut q = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v = kinetic(geom, poisson.phi_half(), &cols[a], &cols[b]);
            q[(a, b)] = v;
            q[(b, a)] = v;
        }
        q[(a, a)] -= inv_phi[a] * geom.cell_area();
    }
    q
}

impl SecondVariation {
    /// Dimension of the full problem, Nx·(Ny − 1).
    pub fn dim(&self) -> usize {
        self.geom.nx * (self.geom.ny - 1)
    }

    /// Q(a, b) for two interior vorticity fields (rows 1..Ny of a node array).
    pub fn form(&self, a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        let g = &self.geom;
        let ua = velocity(&self.poisson, a);
        let ub = velocity(&self.poisson, b);
        let mut s = kinetic(g, self.poisson.phi_half(), &ua, &ub);
        for j in 1..g.ny {
            s -= self.inv_phi[j - 1] * a.row(j).dot(&b.row(j)) * g.cell_area();
        }
        s
    }

    /// The full matrix in the nodal basis, row-major over interior nodes.
    /// Quadratic in memory; meant for small grids and cross-checks.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let g = &self.geom;
        let n = self.dim();
        let cols: Vec<MacField> = (0..n)
            .map(|c| {
                let mut w = Array2::zeros((g.ny + 1, g.nx));
                w[[c / g.nx + 1, c % g.nx]] = 1.0;
                velocity(&self.poisson, &w)
            })
            .collect();
        let inv: Vec<f64> = (0..n).map(|c| self.inv_phi[c / g.nx]).collect();
        gram(g, &self.poisson, &cols, &inv)
    }

    /// All eigenvalues, with the cosine/sine multiplicity, sorted ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        let half = self.geom.nx / 2;
        for (m, b) in self.blocks.iter().enumerate() {
            let ev = SymmetricEigen::new(b.clone()).eigenvalues;
            let copies = if m == 0 || m == half { 1 } else { 2 };
            for _ in 0..copies {
                out.extend(ev.iter().copied());
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Largest and smallest eigenvalue over all blocks.
    pub fn extremes(&self) -> Result<Extremes, StabilityError> {
        let mut acc = Extremes { max: f64::NEG_INFINITY, min: f64::INFINITY, residual: 0.0 };
        for b in &self.blocks {
            let e = extremes(b)?;
            acc.max = acc.max.max(e.max);
            acc.min = acc.min.min(e.min);
            acc.residual = acc.residual.max(e.residual);
        }
        Ok(acc)
    }

    /// The Fourier index whose block holds the largest eigenvalue.
    pub fn leading_mode(&self) -> usize {
        let top = |b: &DMatrix<f64>| SymmetricEigen::new(b.clone()).eigenvalues.max();
        (0..self.blocks.len()).max_by(|&a, &b| top(&self.blocks[a]).total_cmp(&top(&self.blocks[b]))).unwrap_or(0)
    }
}
