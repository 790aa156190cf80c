use nalgebra::DMatrix;

use crate::AlgebraError;

/// Matrices whose condition number exceeds this are treated as singular.
pub const COND_LIMIT: f64 = 1e12;

/// Kaluza-Klein data: base metric μ (n×n), inertia 𝕀 (m×m), connection A (m×n).
#[derive(Debug, Clone, PartialEq)]
pub struct KKData {
    pub base_metric: DMatrix<f64>,
    pub inertia: DMatrix<f64>,
    pub connection: DMatrix<f64>,
}

/// Block metric on base ⊕ fiber; `n` is the base dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    pub n: usize,
    pub blocks: DMatrix<f64>,
}

impl KKData {
    pub fn new(
        base_metric: DMatrix<f64>,
        inertia: DMatrix<f64>,
        connection: DMatrix<f64>,
    ) -> Result<Self, AlgebraError> {
        let d = KKData {
            base_metric,
            inertia,
            connection,
        };
        d.check_dims()?;
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.base_metric.nrows()
    }

    pub fn m(&self) -> usize {
        self.inertia.nrows()
    }

    fn check_dims(&self) -> Result<(), AlgebraError> {
        let (n, m) = (self.base_metric.nrows(), self.inertia.nrows());
        if !self.base_metric.is_square() {
            return Err(AlgebraError::Dimension("base metric is not square".into()));
        }
        if !self.inertia.is_square() {
            return Err(AlgebraError::Dimension("inertia is not square".into()));
        }
        if self.connection.shape() != (m, n) {
            return Err(AlgebraError::Dimension(format!(
                "connection is {:?}, expected ({m}, {n})",
                self.connection.shape()
            )));
        }
        Ok(())
    }
}

/// Rigid body with rotor about the third axis: μ = diag(λ₁, λ₂, λ₃ − i₃), 𝕀 = i₃, A = e₃ᵀ.
pub fn rigid_body_data(lambda: [f64; 3], i3: f64) -> KKData {
    KKData {
        base_metric: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&[
            lambda[0],
            lambda[1],
            lambda[2] - i3,
        ])),
        inertia: DMatrix::from_element(1, 1, i3),
        connection: DMatrix::from_row_slice(1, 3, &[0.0, 0.0, 1.0]),
    }
}

pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn checked_inverse(a: &DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>, AlgebraError> {
    let cond = condition_number(a);
    if !(cond < COND_LIMIT) {
        return Err(AlgebraError::Singular { what, cond });
    }
    a.clone()
        .try_inverse()
        .ok_or(AlgebraError::Singular { what, cond })
}

/// `[[μ + Aᵀ𝕀A, Aᵀ𝕀], [𝕀A, 𝕀]]`.
pub fn kk_metric(data: &KKData) -> Result<MetricMatrix, AlgebraError> {
    data.check_dims()?;
    let (n, m) = (data.n(), data.m());
    let a = &data.connection;
    let ia = &data.inertia * a;
    let mut g = DMatrix::zeros(n + m, n + m);
    g.view_mut((0, 0), (n, n))
        .copy_from(&(&data.base_metric + a.transpose() * &ia));
    g.view_mut((0, n), (n, m))
        .copy_from(&(a.transpose() * &data.inertia));
    g.view_mut((n, 0), (m, n)).copy_from(&ia);
    g.view_mut((n, n), (m, m)).copy_from(&data.inertia);
    Ok(MetricMatrix { n, blocks: g })
}

/// `[[μ⁻¹, −μ⁻¹Aᵀ], [−Aμ⁻¹, 𝕀⁻¹ + Aμ⁻¹Aᵀ]]`.
pub fn kk_metric_inverse(data: &KKData) -> Result<MetricMatrix, AlgebraError> {
    data.check_dims()?;
    let (n, m) = (data.n(), data.m());
    let mu_inv = checked_inverse(&data.base_metric, "base metric")?;
    let i_inv = checked_inverse(&data.inertia, "inertia")?;
    let a = &data.connection;
    let a_mu_inv = a * &mu_inv;
    let mut g = DMatrix::zeros(n + m, n + m);
    g.view_mut((0, 0), (n, n)).copy_from(&mu_inv);
    g.view_mut((0, n), (n, m))
        .copy_from(&(-(&mu_inv * a.transpose())));
    g.view_mut((n, 0), (m, n)).copy_from(&(-&a_mu_inv));
    g.view_mut((n, n), (m, m))
        .copy_from(&(i_inv + &a_mu_inv * a.transpose()));
    Ok(MetricMatrix { n, blocks: g })
}

/// Output of [`modified_kk_data`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedKK {
    pub data: KKData,
    /// C : (base)* → (fiber)*, an m×n matrix.
    pub c: DMatrix<f64>,
    /// T : (fiber)* → (fiber)*, an m×m matrix.
    pub t: DMatrix<f64>,
    pub r: DMatrix<f64>,
}

impl ModifiedKK {
    /// `[[1, 0], [−C, T]]`, the map taking (ν, p) to (ν, q) coordinates.
    pub fn factor(&self) -> DMatrix<f64> {
        let (m, n) = self.c.shape();
        let mut f = DMatrix::zeros(n + m, n + m);
        f.view_mut((0, 0), (n, n)).fill_with_identity();
        f.view_mut((n, 0), (m, n)).copy_from(&(-&self.c));
        f.view_mut((n, n), (m, m)).copy_from(&self.t);
        f
    }
}

/// Controlled Kaluza-Klein data for the constant-coefficient case.
///
/// R = 1 − γ𝕀A μ⁻¹Aᵀ, C = γR⁻¹𝕀Aμ⁻¹, μ_C = (1 + AᵀC)⁻¹μ,
/// A_C = A + 𝕀⁻¹Cμ_C, 𝕀_C = 𝕀/(1+γ), T = (1+γ)(1 + CAᵀ).
pub fn modified_kk_data(data: &KKData, gamma: f64) -> Result<ModifiedKK, AlgebraError> {
    data.check_dims()?;
    let (n, m) = (data.n(), data.m());
    let out_of_range = |e: AlgebraError| match e {
        AlgebraError::Singular { what, cond } => AlgebraError::ControlOutOfRange { gamma, what, cond },
        other => other,
    };
    let mu_inv = checked_inverse(&data.base_metric, "base metric")?;
    let i0 = &data.inertia;
    let i0_inv = checked_inverse(i0, "inertia")?;
    let a0 = &data.connection;
    let ia_mu_inv = i0 * a0 * &mu_inv;
    let r = DMatrix::identity(m, m) - gamma * &ia_mu_inv * a0.transpose();
    let r_inv = checked_inverse(&r, "R").map_err(out_of_range)?;
    let c = gamma * &r_inv * &ia_mu_inv;
    let s = DMatrix::identity(n, n) + a0.transpose() * &c;
    let s_inv = checked_inverse(&s, "1 + A*C").map_err(out_of_range)?;
    let mu_c = &s_inv * &data.base_metric;
    // μ_C is symmetric in exact arithmetic; remove round-off asymmetry.
    let mu_c = (&mu_c + mu_c.transpose()) * 0.5;
    if 1.0 + gamma == 0.0 {
        return Err(AlgebraError::ControlOutOfRange {
            gamma,
            what: "1 + gamma",
            cond: f64::INFINITY,
        });
    }
    let inertia_c = i0 / (1.0 + gamma);
    let a_c = a0 + &i0_inv * &c * &mu_c;
    let t = (1.0 + gamma) * (DMatrix::identity(m, m) + &c * a0.transpose());
    checked_inverse(&t, "T").map_err(out_of_range)?;
    Ok(ModifiedKK {
        data: KKData {
            base_metric: mu_c,
            inertia: inertia_c,
            connection: a_c,
        },
        c,
        t,
        r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAMBDA: [f64; 3] = [3.1, 2.1, 1.05];
    const I3: f64 = 0.05;

    #[test]
    fn zero_connection_is_block_identity() {
        let d = KKData::new(
            DMatrix::identity(3, 3),
            DMatrix::identity(2, 2),
            DMatrix::zeros(2, 3),
        )
        .unwrap();
        assert_eq!(kk_metric(&d).unwrap().blocks, DMatrix::identity(5, 5));
        assert_eq!(kk_metric_inverse(&d).unwrap().blocks, DMatrix::identity(5, 5));
    }

    #[test]
    fn rigid_body_metric_entries() {
        let g = kk_metric(&rigid_body_data(LAMBDA, I3)).unwrap().blocks;
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[
                3.1, 0.0, 0.0, 0.0, //
                0.0, 2.1, 0.0, 0.0, //
                0.0, 0.0, 1.05, 0.05, //
                0.0, 0.0, 0.05, 0.05,
            ],
        );
        assert!((g - expect).amax() < 1e-15);
    }

    #[test]
    fn rigid_body_inverse_entries() {
        let g = kk_metric_inverse(&rigid_body_data(LAMBDA, I3)).unwrap().blocks;
        let big_i3: f64 = 1.0;
        assert!((g[(0, 0)] - 1.0 / 3.1).abs() < 1e-15);
        assert!((g[(1, 1)] - 1.0 / 2.1).abs() < 1e-15);
        assert!((g[(2, 2)] - 1.0 / big_i3).abs() < 1e-14);
        assert!((g[(3, 3)] - (1.0 / I3 + 1.0 / big_i3)).abs() < 1e-12);
        assert!((g[(2, 3)] + 1.0 / big_i3).abs() < 1e-14);
        assert!((g[(3, 2)] + 1.0 / big_i3).abs() < 1e-14);
    }

    #[test]
    fn zero_gamma_is_identity() {
        let d = rigid_body_data(LAMBDA, I3);
        let out = modified_kk_data(&d, 0.0).unwrap();
        assert_eq!(out.data, d);
        assert!(out.c.amax() == 0.0);
        assert_eq!(out.t, DMatrix::identity(1, 1));
    }

    #[test]
    fn singular_r_is_out_of_range() {
        // R = 1 − γ i₃/I₃ vanishes at γ = I₃/i₃ = 20.
        let err = modified_kk_data(&rigid_body_data(LAMBDA, I3), 20.0).unwrap_err();
        assert!(matches!(err, AlgebraError::ControlOutOfRange { .. }));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = KKData::new(
            DMatrix::identity(3, 3),
            DMatrix::identity(2, 2),
            DMatrix::zeros(3, 2),
        )
        .unwrap_err();
        assert!(matches!(err, AlgebraError::Dimension(_)));
    }
}
