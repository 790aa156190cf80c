use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::StabilityError;

/// Below this dimension symmetric problems are solved densely.
pub const DENSE_LIMIT: usize = 4096;

/// Extremal eigenvalues of a symmetric operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub max: f64,
    pub min: f64,
    /// Largest residual ‖Av − λv‖ of the two eigenpairs.
    pub residual: f64,
}

/// (max eigenvalue, min eigenvalue) of a symmetric matrix.
///
/// Dense below `DENSE_LIMIT`, Lanczos above. Fails if the matrix is not
/// symmetric or the extremal residuals do not reach 1e-8 (relative to ‖A‖).
pub fn definiteness(a: &DMatrix<f64>) -> Result<(f64, f64), StabilityError> {
    let e = extremes(a)?;
    Ok((e.max, e.min))
}

pub fn extremes(a: &DMatrix<f64>) -> Result<Extremes, StabilityError> {
    let n = a.nrows();
    if n != a.ncols() || n == 0 {
        return Err(StabilityError::Shape(format!("{}x{} is not a square matrix", a.nrows(), a.ncols())));
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let asym = (a - a.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(StabilityError::NotSymmetric(asym));
    }
    if n < DENSE_LIMIT {
        dense_extremes(a)
    } else {
        lanczos_extremes(|v| a * v, n, 1e-8 * scale, 1000)
    }
}

fn dense_extremes(a: &DMatrix<f64>) -> Result<Extremes, StabilityError> {
    let eig = SymmetricEigen::new(a.clone());
    let (mut imax, mut imin) = (0, 0);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > eig.eigenvalues[imax] {
            imax = i;
        }
        if l < eig.eigenvalues[imin] {
            imin = i;
        }
    }
    let res = |i: usize| {
        let v = eig.eigenvectors.column(i);
        (a * v - eig.eigenvalues[i] * v).norm()
    };
    let residual = res(imax).max(res(imin));
    if residual > 1e-8 * a.amax().max(1.0) {
        return Err(StabilityError::NoConvergence { iterations: 0, residual });
    }
    Ok(Extremes { max: eig.eigenvalues[imax], min: eig.eigenvalues[imin], residual })
}

/// Lanczos with full reorthogonalisation for the two ends of the spectrum.
///
/// `op` applies the symmetric operator; iteration stops once both extremal
/// Ritz pairs have residual below `tol`.
pub fn lanczos_extremes(
    op: impl Fn(&DVector<f64>) -> DVector<f64>,
    n: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Extremes, StabilityError> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    // Deterministic start with every component present.
    let mut q = DVector::from_fn(n, |i, _| 1.0 + ((i * 7919) % 101) as f64 / 101.0);
    q /= q.norm();
    let mut last = f64::INFINITY;
    let steps = max_iter.min(n);
    for it in 0..steps {
        let mut w = op(&q);
        let a = q.dot(&w);
        w -= a * &q;
        if let Some(prev) = basis.last() {
            w -= *beta.last().unwrap() * prev;
        }
        // Twice is enough to keep the basis orthogonal to working precision.
        for _ in 0..2 {
            for b in basis.iter().chain(std::iter::once(&q)) {
                let c = b.dot(&w);
                w -= c * b;
            }
        }
        alpha.push(a);
        basis.push(q.clone());
        let b = w.norm();
        let k = alpha.len();
        if k >= 2 && (k % 10 == 0 || b < tol || it + 1 == steps) {
            let t = DMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j {
                    beta[i]
                } else if j + 1 == i {
                    beta[j]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let (imax, imin) = argmax_argmin(eig.eigenvalues.as_slice());
            // Residual of a Ritz pair is |β_k · last component of the eigenvector|.
            let r = |i: usize| (b * eig.eigenvectors[(k - 1, i)]).abs();
            last = r(imax).max(r(imin));
            if last < tol || b < tol {
                return Ok(Extremes { max: eig.eigenvalues[imax], min: eig.eigenvalues[imin], residual: last });
            }
        }
        if b < tol {
            break;
        }
        beta.push(b);
        q = w / b;
    }
    Err(StabilityError::NoConvergence { iterations: alpha.len(), residual: last })
}

fn argmax_argmin(v: &[f64]) -> (usize, usize) {
    let (mut imax, mut imin) = (0, 0);
    for (i, &x) in v.iter().enumerate() {
        if x > v[imax] {
            imax = i;
        }
        if x < v[imin] {
            imin = i;
        }
    }
    (imax, imin)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_diagonal() {
        assert_eq!(definiteness(&DMatrix::identity(3, 3)).unwrap(), (1.0, 1.0));
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -2.0]));
        assert_eq!(definiteness(&d).unwrap(), (-1.0, -2.0));
    }

    #[test]
    fn rejects_asymmetric() {
        let mut a = DMatrix::identity(3, 3);
        a[(0, 2)] = 0.5;
        assert!(matches!(definiteness(&a), Err(StabilityError::NotSymmetric(_))));
    }

    #[test]
    fn lanczos_matches_dense_on_a_laplacian() {
        let n = 200;
        let a = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0 + (i as f64 / n as f64),
            1 => -1.0,
            _ => 0.0,
        });
        let d = dense_extremes(&a).unwrap();
        let l = lanczos_extremes(|v| &a * v, n, 1e-10, 400).unwrap();
        assert!((d.max - l.max).abs() < 1e-8 && (d.min - l.min).abs() < 1e-8, "{d:?} {l:?}");
    }
}
