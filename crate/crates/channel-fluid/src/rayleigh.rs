use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{ChannelGeometry, Exec, FluidError};

/// Fastest-growing normal mode of the linearized uncontrolled flow.
#[derive(Debug, Clone, PartialEq)]
pub struct RayleighMode {
    /// Largest growth rate k·Im c over all resolved wavenumbers.
    pub rate: f64,
    /// Fourier index and wavenumber attaining it.
    pub mode: usize,
    pub wavenumber: f64,
    pub phase_speed: Complex64,
    /// Vorticity eigenfunction on interior node rows, unit maximum modulus.
    pub eigenfunction: Vec<Complex64>,
    /// Growth rate of every wavenumber 1..=max_mode.
    pub rates: Vec<f64>,
}

/// Normal modes ω̃ ∝ e^{ik(x − ct)} of ω̃_t + Γ∂ₓω̃ + ω_e′∂ₓψ̃ = 0 about u_e.
///
/// For each wavenumber c is an eigenvalue of diag(Γ) + diag(ω_e′)(δ² − k²)⁻¹
/// on the interior rows, with ψ̃ = 0 on the walls. `max_mode` caps the
/// Fourier indices scanned (at most Nx/2 − 1).
pub fn rayleigh_growth_rate(geom: &ChannelGeometry, max_mode: usize, exec: Exec) -> Result<RayleighMode, FluidError> {
    let n = geom.ny - 1;
    let ys: Vec<f64> = (1..geom.ny).map(|j| geom.y(j)).collect();
    let base = |k: f64| -> Result<DMatrix<f64>, FluidError> {
        let h2 = geom.dy() * geom.dy();
        let l = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                -2.0 / h2 - k * k
            } else if i.abs_diff(j) == 1 {
                1.0 / h2
            } else {
                0.0
            }
        });
        let linv = l.try_inverse().ok_or_else(|| FluidError::Eigen("singular Laplacian".into()))?;
        let mut b = DMatrix::from_fn(n, n, |i, j| ys[i].cos() * linv[(i, j)]);
        for i in 0..n {
            b[(i, i)] += ys[i].cos();
        }
        Ok(b)
    };
    let top = max_mode.min(geom.nx / 2 - 1).max(1);
    let results = exec.map(top, top * n * n * n, |mm| -> Result<(f64, Complex64), FluidError> {
        let k = geom.wavenumber(mm + 1);
        let ev = base(k)?.complex_eigenvalues();
        let best = ev
            .iter()
            .cloned()
            .max_by(|a, b| a.im.total_cmp(&b.im))
            .ok_or_else(|| FluidError::Eigen("empty spectrum".into()))?;
        if !best.re.is_finite() || !best.im.is_finite() {
            return Err(FluidError::Eigen(format!("non-finite eigenvalue at k = {k}")));
        }
        Ok((k * best.im, best))
    });
    let results: Vec<(f64, Complex64)> = results.into_iter().collect::<Result<_, _>>()?;
    let (idx, &(rate, c)) = results
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .expect("at least one wavenumber");
    let k = geom.wavenumber(idx + 1);
    let eigenfunction = inverse_iteration(&base(k)?, c)?;
    Ok(RayleighMode {
        rate,
        mode: idx + 1,
        wavenumber: k,
        phase_speed: c,
        eigenfunction,
        rates: results.iter().map(|r| r.0).collect(),
    })
}

fn inverse_iteration(b: &DMatrix<f64>, c: Complex64) -> Result<Vec<Complex64>, FluidError> {
    let n = b.nrows();
    let shift = c + Complex64::new(1e-10 * (1.0 + c.norm()), 1e-10);
    let a = DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(b[(i, j)], 0.0) - if i == j { shift } else { Complex64::new(0.0, 0.0) }
    });
    let lu = a.lu();
    let mut v = DVector::from_element(n, Complex64::new(1.0, 0.0));
    for _ in 0..3 {
        v = lu.solve(&v).ok_or_else(|| FluidError::Eigen("inverse iteration failed".into()))?;
        let m = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        v /= Complex64::new(m, 0.0);
    }
    Ok(v.iter().cloned().collect())
}
