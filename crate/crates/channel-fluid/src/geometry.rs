use std::f64::consts::PI;

use crate::FluidError;

/// The channel [0, Xπ] × [0, Yπ], periodic in x, with walls at y = 0 and y = Yπ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGeometry {
    /// Length factor X.
    pub x_len: f64,
    /// Width factor Y.
    pub y_len: f64,
    pub nx: usize,
    /// Number of y intervals; there are `ny + 1` node rows including both walls.
    pub ny: usize,
}

impl ChannelGeometry {
    pub fn new(x_len: f64, y_len: f64, nx: usize, ny: usize) -> Result<Self, FluidError> {
        if !(x_len > 0.0 && x_len.is_finite()) {
            return Err(FluidError::Geometry(format!("X must be positive, got {x_len}")));
        }
        if !(y_len > 0.0 && y_len.is_finite()) {
            return Err(FluidError::Geometry(format!("Y must be positive, got {y_len}")));
        }
        if nx < 4 || !nx.is_power_of_two() {
            return Err(FluidError::Geometry(format!("Nx must be a power of two, got {nx}")));
        }
        if ny < 16 {
            return Err(FluidError::Geometry(format!("Ny must be at least 16, got {ny}")));
        }
        Ok(Self { x_len, y_len, nx, ny })
    }

    pub fn lx(&self) -> f64 {
        self.x_len * PI
    }

    pub fn ly(&self) -> f64 {
        self.y_len * PI
    }

    pub fn dx(&self) -> f64 {
        self.lx() / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly() / self.ny as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.dy()
    }

    pub fn y_half(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dy()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..=self.ny).map(|j| self.y(j)).collect()
    }

    pub fn ys_half(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y_half(j)).collect()
    }

    /// Number of retained Fourier modes, 0..=Nx/2.
    pub fn modes(&self) -> usize {
        self.nx / 2 + 1
    }

    /// Wavenumber 2πm/(Xπ) of mode m.
    pub fn wavenumber(&self, m: usize) -> f64 {
        2.0 * m as f64 / self.x_len
    }

    /// Trapezoid weight of node row j.
    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 || j == self.ny {
            0.5
        } else {
            1.0
        }
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Same channel at a different resolution.
    pub fn with_resolution(&self, nx: usize, ny: usize) -> Result<Self, FluidError> {
        Self::new(self.x_len, self.y_len, nx, ny)
    }
}
