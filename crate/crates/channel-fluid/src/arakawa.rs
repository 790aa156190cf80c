use ndarray::{Array2, ArrayView2};

use crate::{ChannelGeometry, Exec};

/// Arakawa Jacobian J(ψ, ω) = ψₓω_y − ψ_yωₓ on all node rows.
///
/// The walls use ghost rows ψ₋₁ = 2ψ₀ − ψ₁ (linear continuation) and
/// ω₋₁ = ω₁ (mirror), and likewise at the top. With these the weighted sums
/// of J, ωJ and ψJ vanish identically, for any ψ that is constant on each wall.
pub fn jacobian(psi: ArrayView2<f64>, omega: ArrayView2<f64>, geom: &ChannelGeometry, exec: Exec) -> Array2<f64> {
    let (ny, nx) = (geom.ny, geom.nx);
    let p = with_ghosts(psi, ny, |a, b| 2.0 * a - b);
    let w = with_ghosts(omega, ny, |_, b| b);
    let scale = 1.0 / (12.0 * geom.dx() * geom.dy());
    let mut out = vec![0.0; (ny + 1) * nx];
    exec.rows_mut(&mut out, nx, |j, row| {
        // Extended row index of node row j.
        let (jm, j0, jp) = (j, j + 1, j + 2);
        for i in 0..nx {
            let ip = (i + 1) % nx;
            let im = (i + nx - 1) % nx;
            let pe = |r: usize, c: usize| p[r * nx + c];
            let we = |r: usize, c: usize| w[r * nx + c];
            let j1 = (pe(j0, ip) - pe(j0, im)) * (we(jp, i) - we(jm, i))
                - (pe(jp, i) - pe(jm, i)) * (we(j0, ip) - we(j0, im));
            let j2 = pe(j0, ip) * (we(jp, ip) - we(jm, ip)) - pe(j0, im) * (we(jp, im) - we(jm, im))
                - pe(jp, i) * (we(jp, ip) - we(jp, im))
                + pe(jm, i) * (we(jm, ip) - we(jm, im));
            let j3 = we(jp, i) * (pe(jp, ip) - pe(jp, im)) - we(jm, i) * (pe(jm, ip) - pe(jm, im))
                - we(j0, ip) * (pe(jp, ip) - pe(jm, ip))
                + we(j0, im) * (pe(jp, im) - pe(jm, im));
            row[i] = (j1 + j2 + j3) * scale;
        }
    });
    Array2::from_shape_vec((ny + 1, nx), out).expect("shape fixed above")
}

// Copies a node field into Ny + 3 rows with one ghost row on each side.
fn with_ghosts(f: ArrayView2<f64>, ny: usize, ghost: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let nx = f.ncols();
    let mut e = vec![0.0; (ny + 3) * nx];
    for j in 0..=ny {
        for i in 0..nx {
            e[(j + 1) * nx + i] = f[[j, i]];
        }
    }
    for i in 0..nx {
        e[i] = ghost(f[[0, i]], f[[1, i]]);
        e[(ny + 2) * nx + i] = ghost(f[[ny, i]], f[[ny - 1, i]]);
    }
    e
}

/// −u·∇f for u = ∇ˢψ, through the Arakawa Jacobian.
pub fn advect_scalar(f: ArrayView2<f64>, psi: ArrayView2<f64>, geom: &ChannelGeometry, exec: Exec) -> Array2<f64> {
    -jacobian(psi, f, geom, exec)
}

/// Trapezoid quadrature over the node grid.
pub(crate) fn node_integral(f: ArrayView2<f64>, geom: &ChannelGeometry) -> f64 {
    let mut s = 0.0;
    for j in 0..=geom.ny {
        s += geom.weight(j) * f.row(j).sum();
    }
    s * geom.cell_area()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_is_not_advected() {
        let g = ChannelGeometry::new(2.0, 0.9, 16, 16).unwrap();
        let psi = Array2::from_shape_fn((17, 16), |(j, i)| g.x(i).sin() * g.y(j).sin() + g.y(j));
        let f = Array2::from_elem((17, 16), 3.0);
        assert!(advect_scalar(f.view(), psi.view(), &g, Exec::Sequential).iter().all(|v| v.abs() < 1e-12));
    }
}
