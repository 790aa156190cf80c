use ndarray::Array2;

use crate::AlgebraError;

/// `X ⋄ q = [q dX]`, returned as the pointwise one-form `(q ∂ₓX, q ∂_yX)`.
///
/// Fields are laid out `[row = y index, col = x index]`, periodic in x with
/// spacing `dx`, bounded in y with spacing `dy`. Centered differences inside,
/// second-order one-sided differences on the wall rows.
pub fn discrete_diamond(
    x_field: &Array2<f64>,
    q: &Array2<f64>,
    dx: f64,
    dy: f64,
) -> Result<(Array2<f64>, Array2<f64>), AlgebraError> {
    if x_field.dim() != q.dim() {
        return Err(AlgebraError::Dimension(format!(
            "X has shape {:?}, q has shape {:?}",
            x_field.dim(),
            q.dim()
        )));
    }
    let (ny1, nx) = x_field.dim();
    if ny1 < 3 || nx < 2 {
        return Err(AlgebraError::Dimension(format!(
            "grid {:?} too small for the stencil",
            x_field.dim()
        )));
    }
    let mut ax = Array2::zeros((ny1, nx));
    let mut ay = Array2::zeros((ny1, nx));
    for j in 0..ny1 {
        for i in 0..nx {
            let ip = (i + 1) % nx;
            let im = (i + nx - 1) % nx;
            let gx = (x_field[[j, ip]] - x_field[[j, im]]) / (2.0 * dx);
            let gy = if j == 0 {
                (-3.0 * x_field[[0, i]] + 4.0 * x_field[[1, i]] - x_field[[2, i]]) / (2.0 * dy)
            } else if j == ny1 - 1 {
                (3.0 * x_field[[j, i]] - 4.0 * x_field[[j - 1, i]] + x_field[[j - 2, i]])
                    / (2.0 * dy)
            } else {
                (x_field[[j + 1, i]] - x_field[[j - 1, i]]) / (2.0 * dy)
            };
            ax[[j, i]] = q[[j, i]] * gx;
            ay[[j, i]] = q[[j, i]] * gy;
        }
    }
    Ok((ax, ay))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_potential_gives_zero() {
        let x = Array2::from_elem((9, 8), 2.5);
        let q = Array2::from_shape_fn((9, 8), |(j, i)| (j * i) as f64);
        let (ax, ay) = discrete_diamond(&x, &q, 0.1, 0.2).unwrap();
        assert!(ax.iter().chain(ay.iter()).all(|v| *v == 0.0));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let x = Array2::zeros((9, 8));
        let q = Array2::zeros((8, 8));
        assert!(discrete_diamond(&x, &q, 0.1, 0.1).is_err());
    }
}
