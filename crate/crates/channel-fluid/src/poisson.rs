use control_design::ShearControl;
use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use crate::{ChannelGeometry, Exec, FluidError, Spectral};

/// Solver for ∂ₓ²ψ + ∂_y(Φ ∂_yψ) = ω with ψ = 0 on the lower wall.
///
/// Φ is sampled on half rows, so each Fourier mode is a symmetric tridiagonal
/// system on the interior node rows. Nonzero modes vanish on both walls. The
/// x-mean is fixed by the total momentum M = ∫Φu₁, which pins the constant
/// value of ψ on the upper wall.
#[derive(Debug, Clone)]
pub struct ModifiedPoisson {
    geom: ChannelGeometry,
    phi_half: Vec<f64>,
    // Per mode: Thomas elimination factors.
    cp: Vec<Vec<f64>>,
    inv_den: Vec<Vec<f64>>,
    spectral: Spectral,
}

impl ModifiedPoisson {
    pub fn new(geom: &ChannelGeometry, phi_half: &[f64], exec: Exec) -> Result<Self, FluidError> {
        if phi_half.len() != geom.ny {
            return Err(FluidError::Shape(format!(
                "Φ needs {} half-row samples, got {}",
                geom.ny,
                phi_half.len()
            )));
        }
        let min = phi_half.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(FluidError::NotPositive(min));
        }
        let n = geom.ny - 1;
        let h2 = geom.dy() * geom.dy();
        let spectral = Spectral::new(geom, exec);
        let mut cp = Vec::with_capacity(geom.modes());
        let mut inv_den = Vec::with_capacity(geom.modes());
        for m in 0..geom.modes() {
            let k2 = geom.wavenumber(m).powi(2);
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for j in 0..n {
                let lo = phi_half[j] / h2;
                let hi = phi_half[j + 1] / h2;
                let b = -(lo + hi) - k2;
                let den = if j == 0 { b } else { b - lo * c[j - 1] };
                d[j] = 1.0 / den;
                c[j] = hi * d[j];
            }
            cp.push(c);
            inv_den.push(d);
        }
        Ok(Self {
            geom: *geom,
            phi_half: phi_half.to_vec(),
            cp,
            inv_den,
            spectral,
        })
    }

    pub fn from_control(
        geom: &ChannelGeometry,
        control: &ShearControl,
        exec: Exec,
    ) -> Result<Self, FluidError> {
        let phi = control.phi_profile(&geom.ys_half());
        Self::new(geom, &phi, exec)
    }

    /// The standard Laplacian (Φ ≡ 1).
    pub fn unit(geom: &ChannelGeometry, exec: Exec) -> Self {
        Self::new(geom, &vec![1.0; geom.ny], exec).expect("unit metric is positive")
    }

    pub fn geometry(&self) -> &ChannelGeometry {
        &self.geom
    }

    pub fn phi_half(&self) -> &[f64] {
        &self.phi_half
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    /// Solves mode by mode. `wh` holds all node rows; only interior rows are read.
    pub fn solve_hat(&self, wh: ArrayView2<Complex64>, momentum: f64) -> Array2<Complex64> {
        let g = &self.geom;
        let (ny, nh) = (g.ny, g.modes());
        let dy = g.dy();
        let h2 = dy * dy;
        // The Nyquist mode has no x-derivative on the grid and is dropped.
        let cols = self.spectral.exec.map(nh - 2, nh * ny, |mm| {
            let m = mm + 1;
            let (c, d) = (&self.cp[m], &self.inv_den[m]);
            let n = ny - 1;
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                let rhs = wh[[j + 1, m]];
                x[j] = if j == 0 {
                    rhs * d[0]
                } else {
                    (rhs - x[j - 1] * (self.phi_half[j] / h2)) * d[j]
                };
            }
            for j in (0..n - 1).rev() {
                let next = x[j + 1];
                x[j] -= next * c[j];
            }
            x
        });
        let mut out = Array2::zeros((ny + 1, nh));
        for (mm, col) in cols.into_iter().enumerate() {
            for (j, v) in col.into_iter().enumerate() {
                out[[j + 1, mm + 1]] = v;
            }
        }
        let nxf = g.nx as f64;
        for (j, v) in self.mean_profile(wh, momentum).into_iter().enumerate() {
            out[[j, 0]] = Complex64::new(v * nxf, 0.0);
        }
        out
    }

    // x-mean of ψ on node rows.
    fn mean_profile(&self, wh: ArrayView2<Complex64>, momentum: f64) -> Vec<f64> {
        let g = &self.geom;
        let (ny, dy) = (g.ny, g.dy());
        let nxf = g.nx as f64;
        // F_j = Φ_{j+½}(ψ̄_{j+1} − ψ̄_j)/dy; ω̄ fixes its increments, M its level.
        let mut s = vec![0.0; ny];
        for j in 1..ny {
            s[j] = s[j - 1] + dy * wh[[j, 0]].re / nxf;
        }
        let f0 = (-momentum / (g.lx() * dy) - s.iter().sum::<f64>()) / ny as f64;
        let mut psi = vec![0.0; ny + 1];
        for j in 0..ny {
            psi[j + 1] = psi[j] + dy * (f0 + s[j]) / self.phi_half[j];
        }
        psi
    }

    pub fn solve(&self, omega: ArrayView2<f64>, momentum: f64) -> Array2<f64> {
        self.check_rows(omega.nrows());
        let wh = self.spectral.forward(omega);
        let ph = self.solve_hat(wh.view(), momentum);
        let mut psi = self.spectral.inverse(ph.view());
        // Keep the walls exactly constant.
        let top = psi.row(self.geom.ny).sum() / self.geom.nx as f64;
        psi.row_mut(0).fill(0.0);
        psi.row_mut(self.geom.ny).fill(top);
        psi
    }

    /// Δ^Cψ on interior rows; wall rows are zero.
    pub fn apply(&self, psi: ArrayView2<f64>) -> Array2<f64> {
        self.check_rows(psi.nrows());
        let g = &self.geom;
        let h2 = g.dy() * g.dy();
        let mut ph = self.spectral.forward(psi);
        for (m, &k) in self.spectral.wavenumbers().iter().enumerate() {
            let k2 = if m == g.nx / 2 { g.wavenumber(m).powi(2) } else { k * k };
            ph.column_mut(m).mapv_inplace(|v| v * -k2);
        }
        let pxx = self.spectral.inverse(ph.view());
        let mut out = Array2::zeros(psi.dim());
        for j in 1..g.ny {
            let (lo, hi) = (self.phi_half[j - 1], self.phi_half[j]);
            for i in 0..g.nx {
                out[[j, i]] = pxx[[j, i]]
                    + (hi * (psi[[j + 1, i]] - psi[[j, i]]) - lo * (psi[[j, i]] - psi[[j - 1, i]])) / h2;
            }
        }
        out
    }

    /// Total momentum ∫Φu₁ of the flow with stream function ψ.
    pub fn momentum(&self, psi: ArrayView2<f64>) -> f64 {
        let g = &self.geom;
        let mut s = 0.0;
        for j in 0..g.ny {
            let row: f64 = (0..g.nx).map(|i| psi[[j + 1, i]] - psi[[j, i]]).sum();
            s += self.phi_half[j] * row;
        }
        -s * g.dx()
    }

    fn check_rows(&self, rows: usize) {
        assert_eq!(rows, self.geom.ny + 1, "field must have Ny + 1 rows");
    }
}

/// One-shot modified solve with the momentum taken as zero.
pub fn poisson_solve_modified(
    omega: ArrayView2<f64>,
    phi_half: &[f64],
    geom: &ChannelGeometry,
    momentum: f64,
) -> Result<Array2<f64>, FluidError> {
    Ok(ModifiedPoisson::new(geom, phi_half, Exec::default())?.solve(omega, momentum))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_metric() {
        let g = ChannelGeometry::new(2.0, 0.9, 16, 16).unwrap();
        let mut phi = vec![1.0; 16];
        phi[3] = -0.1;
        assert!(matches!(
            ModifiedPoisson::new(&g, &phi, Exec::Sequential),
            Err(FluidError::NotPositive(_))
        ));
    }

    #[test]
    fn zero_vorticity_zero_momentum_gives_zero() {
        let g = ChannelGeometry::new(2.0, 0.9, 16, 16).unwrap();
        let p = ModifiedPoisson::unit(&g, Exec::Sequential);
        let psi = p.solve(Array2::zeros((17, 16)).view(), 0.0);
        assert!(psi.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn momentum_round_trip() {
        let g = ChannelGeometry::new(2.0, 0.9, 16, 32).unwrap();
        let phi: Vec<f64> = g.ys_half().iter().map(|y| 1.0 - 0.5 * y.sin().powi(2)).collect();
        let p = ModifiedPoisson::new(&g, &phi, Exec::Sequential).unwrap();
        let w = Array2::from_shape_fn((33, 16), |(j, i)| g.y(j).sin() + 0.1 * g.x(i).cos());
        let psi = p.solve(w.view(), 1.7);
        assert!((p.momentum(psi.view()) - 1.7).abs() < 1e-12);
        let r = p.apply(psi.view());
        for j in 1..32 {
            for i in 0..16 {
                assert!((r[[j, i]] - w[[j, i]]).abs() < 1e-10);
            }
        }
    }
}
