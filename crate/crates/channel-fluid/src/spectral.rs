use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{ChannelGeometry, Exec};

/// Row-wise real Fourier transforms in x.
///
/// Spectra keep modes 0..=Nx/2 and are unnormalized: a constant row c has
/// mode-0 coefficient Nx·c. The Nyquist mode is carried but differentiated to zero.
#[derive(Clone)]
pub struct Spectral {
    nx: usize,
    k: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    pub exec: Exec,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("nx", &self.nx).field("exec", &self.exec).finish()
    }
}

impl Spectral {
    pub fn new(geom: &ChannelGeometry, exec: Exec) -> Self {
        let mut planner = FftPlanner::new();
        let nx = geom.nx;
        let mut k: Vec<f64> = (0..geom.modes()).map(|m| geom.wavenumber(m)).collect();
        // The Nyquist mode has no well-defined derivative on a real grid.
        k[nx / 2] = 0.0;
        Self {
            nx,
            k,
            fwd: planner.plan_fft_forward(nx),
            inv: planner.plan_fft_inverse(nx),
            exec,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn modes(&self) -> usize {
        self.nx / 2 + 1
    }

    /// Derivative multipliers ik_m (zero at Nyquist) as real wavenumbers.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn forward(&self, f: ArrayView2<f64>) -> Array2<Complex64> {
        let (rows, nx) = f.dim();
        assert_eq!(nx, self.nx, "row length does not match the transform");
        let nh = self.modes();
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let fft = &self.fwd;
        self.exec.rows_mut(&mut buf, nx, |_, row| fft.process(row));
        let mut out = Array2::zeros((rows, nh));
        for (r, row) in buf.chunks(nx).enumerate() {
            for m in 0..nh {
                out[[r, m]] = row[m];
            }
        }
        out
    }

    pub fn inverse(&self, fh: ArrayView2<Complex64>) -> Array2<f64> {
        let (rows, nh) = fh.dim();
        assert_eq!(nh, self.modes(), "spectrum width does not match the transform");
        let nx = self.nx;
        let mut buf = vec![Complex64::new(0.0, 0.0); rows * nx];
        for (r, row) in buf.chunks_mut(nx).enumerate() {
            row[0] = Complex64::new(fh[[r, 0]].re, 0.0);
            for m in 1..nx / 2 {
                row[m] = fh[[r, m]];
                row[nx - m] = fh[[r, m]].conj();
            }
            row[nx / 2] = Complex64::new(fh[[r, nx / 2]].re, 0.0);
        }
        let fft = &self.inv;
        self.exec.rows_mut(&mut buf, nx, |_, row| fft.process(row));
        let scale = 1.0 / nx as f64;
        Array2::from_shape_vec((rows, nx), buf.iter().map(|c| c.re * scale).collect())
            .expect("shape is rows × nx by construction")
    }

    /// Multiplies every mode by ik_m.
    pub fn dx_hat(&self, fh: &mut Array2<Complex64>) {
        for mut row in fh.rows_mut() {
            for (m, v) in row.iter_mut().enumerate() {
                *v *= Complex64::new(0.0, self.k[m]);
            }
        }
    }

    pub fn dx(&self, f: ArrayView2<f64>) -> Array2<f64> {
        let mut fh = self.forward(f);
        self.dx_hat(&mut fh);
        self.inverse(fh.view())
    }
}

/// Exact solution operator of f_t + U(y)∂ₓf = 0 over a fixed time, row by row.
pub(crate) struct RowShift<'a> {
    sp: &'a Spectral,
    phase: Array2<Complex64>,
}

impl<'a> RowShift<'a> {
    pub(crate) fn new(sp: &'a Spectral, speeds: &[f64], tau: f64) -> Self {
        let k = sp.wavenumbers();
        let phase = Array2::from_shape_fn((speeds.len(), k.len()), |(j, m)| {
            Complex64::from_polar(1.0, -k[m] * speeds[j] * tau)
        });
        Self { sp, phase }
    }

    /// The operator over twice the time.
    pub(crate) fn doubled(&self) -> Self {
        Self { sp: self.sp, phase: self.phase.mapv(|z| z * z) }
    }

    pub(crate) fn apply(&self, f: ArrayView2<f64>) -> Array2<f64> {
        let fh = self.sp.forward(f) * &self.phase;
        self.sp.inverse(fh.view())
    }
}

/// Row means of a field.
pub(crate) fn row_means(f: ArrayView2<f64>) -> Vec<f64> {
    let n = f.ncols() as f64;
    f.rows().into_iter().map(|r| r.sum() / n).collect()
}
