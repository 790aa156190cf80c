use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use crate::{ChannelGeometry, Spectral};

/// A vector field (or one-form) on the staggered grid.
///
/// `u1` has Ny half rows (y_{j+½}); `u2` has Ny + 1 node rows whose wall rows
/// carry the normal component.
#[derive(Debug, Clone, PartialEq)]
pub struct MacField {
    pub u1: Array2<f64>,
    pub u2: Array2<f64>,
}

impl MacField {
    pub fn zeros(geom: &ChannelGeometry) -> Self {
        Self {
            u1: Array2::zeros((geom.ny, geom.nx)),
            u2: Array2::zeros((geom.ny + 1, geom.nx)),
        }
    }

    pub fn scaled_add(&mut self, a: f64, other: &MacField) {
        self.u1.scaled_add(a, &other.u1);
        self.u2.scaled_add(a, &other.u2);
    }

    pub fn max_abs(&self) -> f64 {
        self.u1.iter().chain(self.u2.iter()).fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.u1.iter().chain(self.u2.iter()).all(|v| v.is_finite())
    }
}

/// ∇ˢψ = (−∂_yψ, ∂ₓψ). Divergence-free by construction; tangent to the walls
/// whenever ψ is constant along each wall.
pub fn velocity_from_stream(psi: ArrayView2<f64>, geom: &ChannelGeometry, sp: &Spectral) -> MacField {
    let dy = geom.dy();
    let mut u1 = Array2::zeros((geom.ny, geom.nx));
    for j in 0..geom.ny {
        for i in 0..geom.nx {
            u1[[j, i]] = -(psi[[j + 1, i]] - psi[[j, i]]) / dy;
        }
    }
    MacField { u1, u2: sp.dx(psi) }
}

/// Discrete divergence on cells (half rows).
pub fn divergence(v: &MacField, geom: &ChannelGeometry, sp: &Spectral) -> Array2<f64> {
    let dy = geom.dy();
    let mut d = sp.dx(v.u1.view());
    for j in 0..geom.ny {
        for i in 0..geom.nx {
            d[[j, i]] += (v.u2[[j + 1, i]] - v.u2[[j, i]]) / dy;
        }
    }
    d
}

/// Gradient of a cell field; the wall rows of the y-component are zero.
pub fn gradient(phi: ArrayView2<f64>, geom: &ChannelGeometry, sp: &Spectral) -> MacField {
    let dy = geom.dy();
    let mut u2 = Array2::zeros((geom.ny + 1, geom.nx));
    for j in 1..geom.ny {
        for i in 0..geom.nx {
            u2[[j, i]] = (phi[[j, i]] - phi[[j - 1, i]]) / dy;
        }
    }
    MacField { u1: sp.dx(phi), u2 }
}

/// Scalar curl ∂ₓv₂ − ∂_y v₁ on interior node rows; wall rows are zero.
pub fn curl(v: &MacField, geom: &ChannelGeometry, sp: &Spectral) -> Array2<f64> {
    let dy = geom.dy();
    let mut c = sp.dx(v.u2.view());
    c.row_mut(0).fill(0.0);
    c.row_mut(geom.ny).fill(0.0);
    for j in 1..geom.ny {
        for i in 0..geom.nx {
            c[[j, i]] -= (v.u1[[j, i]] - v.u1[[j - 1, i]]) / dy;
        }
    }
    c
}

/// L² inner product; wall rows of the y-components carry trapezoid weight ½.
pub fn mac_inner(a: &MacField, b: &MacField, geom: &ChannelGeometry) -> f64 {
    let s1: f64 = a.u1.iter().zip(b.u1.iter()).map(|(x, y)| x * y).sum();
    let mut s2 = 0.0;
    for j in 0..=geom.ny {
        let r: f64 = a.u2.row(j).iter().zip(b.u2.row(j).iter()).map(|(x, y)| x * y).sum();
        s2 += geom.weight(j) * r;
    }
    (s1 + s2) * geom.cell_area()
}

/// Orthogonal projection onto discretely divergence-free fields tangent to the walls.
///
/// The wall-normal component is discarded first; what remains is v − ∇g with
/// the cell Laplacian of g (Neumann at the walls) equal to div v.
pub fn leray_project(v: &MacField, geom: &ChannelGeometry, sp: &Spectral) -> MacField {
    let mut w = v.clone();
    w.u2.row_mut(0).fill(0.0);
    w.u2.row_mut(geom.ny).fill(0.0);
    let div = divergence(&w, geom, sp);
    let dh = sp.forward(div.view());
    let (ny, nh) = (geom.ny, geom.modes());
    let h2 = geom.dy() * geom.dy();
    let mut gh = Array2::<Complex64>::zeros((ny, nh));
    let k = sp.wavenumbers();
    for m in 1..nh {
        // Neumann cell Laplacian −k² + δ²; rows 0 and ny−1 lose their outer neighbour.
        let k2 = k[m] * k[m];
        if k2 == 0.0 {
            continue;
        }
        let mut cp = vec![0.0; ny];
        let mut x = vec![Complex64::new(0.0, 0.0); ny];
        for j in 0..ny {
            let lo = if j > 0 { 1.0 / h2 } else { 0.0 };
            let hi = if j + 1 < ny { 1.0 / h2 } else { 0.0 };
            let b = -lo - hi - k2;
            let den = if j == 0 { b } else { b - lo * cp[j - 1] };
            cp[j] = hi / den;
            x[j] = if j == 0 { dh[[0, m]] / den } else { (dh[[j, m]] - x[j - 1] * lo) / den };
        }
        for j in (0..ny - 1).rev() {
            let next = x[j + 1];
            x[j] -= next * cp[j];
        }
        for j in 0..ny {
            gh[[j, m]] = x[j];
        }
    }
    let g = sp.inverse(gh.view());
    let mut out = gradient(g.view(), geom, sp);
    out.u1 = &w.u1 - &out.u1;
    out.u2 = &w.u2 - &out.u2;
    // Modes without an x-derivative (the mean and Nyquist) have div = δ_y v₂ only;
    // there v₂ is a pure gradient and is removed entirely.
    let mut vh = sp.forward(out.u2.view());
    for (m, &km) in k.iter().enumerate() {
        if km == 0.0 {
            vh.column_mut(m).fill(Complex64::new(0.0, 0.0));
        }
    }
    out.u2 = sp.inverse(vh.view());
    out.u2.row_mut(0).fill(0.0);
    out.u2.row_mut(ny).fill(0.0);
    out
}

/// X⋄q = q dX as a one-form, for X and q on half rows.
///
/// Split as ½d(qX) + ½(q dX − X dq): the first part is an exact discrete
/// gradient, the second vanishes pointwise whenever X is a multiple of q.
pub fn diamond(x: ArrayView2<f64>, q: ArrayView2<f64>, geom: &ChannelGeometry, sp: &Spectral) -> MacField {
    let dy = geom.dy();
    let qx = &q * &x;
    let dqx = sp.dx(qx.view());
    let dxx = sp.dx(x);
    let dxq = sp.dx(q);
    let u1 = 0.5 * (&dqx + &(&q * &dxx) - &(&x * &dxq));
    let mut u2 = Array2::zeros((geom.ny + 1, geom.nx));
    for j in 1..geom.ny {
        for i in 0..geom.nx {
            // Equal to the node average of q times the difference of X.
            u2[[j, i]] = 0.5 * (q[[j, i]] + q[[j - 1, i]]) * (x[[j, i]] - x[[j - 1, i]]) / dy;
        }
    }
    MacField { u1, u2 }
}
