use crate::DesignError;

/// Constants of the designed potential a₀ = b(ω_e).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignConstants {
    pub b_bar: f64,
    pub b_under: f64,
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
}

/// r = (1−Y²)/3, α = r/X², β = (Y²+r)/Y², b̄ = √(1−α/β), b̲ = √(1−α).
pub fn design_constants(x: f64, y: f64) -> Result<DesignConstants, DesignError> {
    if !(x > 0.0) {
        return Err(DesignError::Length(x));
    }
    if !(0.5..1.0).contains(&y) {
        return Err(DesignError::Width(y));
    }
    let d = constants_unchecked(x, y);
    if d.alpha > 1.0 {
        return Err(DesignError::TooShort(d.alpha));
    }
    Ok(d)
}

pub(crate) fn constants_unchecked(x: f64, y: f64) -> DesignConstants {
    let r = (1.0 - y * y) / 3.0;
    let alpha = r / (x * x);
    let beta = (y * y + r) / (y * y);
    DesignConstants {
        b_bar: (1.0 - alpha / beta).sqrt(),
        b_under: (1.0 - alpha).sqrt(),
        alpha,
        beta,
        r,
    }
}

impl DesignConstants {
    /// Φ̄₁ = 1 − b̲² (= α).
    pub fn phi_max(&self) -> f64 {
        1.0 - self.b_under * self.b_under
    }

    /// Φ̲₁ = 1 − b̄² (= α/β).
    pub fn phi_min(&self) -> f64 {
        1.0 - self.b_bar * self.b_bar
    }
}

/// κ = ε(2b̲−ε) / (Φ̄₁(Φ̄₁ + (2b̲−ε)ε)).
pub fn kappa(d: &DesignConstants, eps: f64) -> f64 {
    let z = eps * (2.0 * d.b_under - eps);
    let p = d.phi_max();
    z / (p * (p + z))
}

/// Largest ε with κΦ̄₁ < r/2.
pub fn default_margin(d: &DesignConstants) -> f64 {
    // κΦ̄₁ = z/(Φ̄₁ + z) with z = ε(2b̲ − ε); solve z/(Φ̄₁ + z) = r/2.
    let h = 0.5 * d.r;
    let z = h * d.phi_max() / (1.0 - h);
    let eps = d.b_under - (d.b_under * d.b_under - z).sqrt();
    eps * (1.0 - 1e-12)
}

/// The map b(ω) = b̄ − (b̄ − b̲)ω on [0, 1], continued linearly and saturated
/// with a C² blend so that b stays in [b̲ − ε, b̄ + ε].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BMap {
    pub b_bar: f64,
    pub b_under: f64,
    pub eps: f64,
    /// ω is divided by this before applying b (1 unless the width is below ½).
    pub omega_scale: f64,
}

/// Saturation u ↦ u − u³/4 + u⁴/16 on [0, 2], 1 beyond; C² at both ends.
fn sat(u: f64) -> (f64, f64, f64) {
    if u >= 2.0 {
        (1.0, 0.0, 0.0)
    } else {
        (
            u - u.powi(3) / 4.0 + u.powi(4) / 16.0,
            1.0 - 0.75 * u * u + 0.25 * u.powi(3),
            -1.5 * u + 0.75 * u * u,
        )
    }
}

impl BMap {
    pub fn new(d: &DesignConstants, eps: f64) -> Self {
        BMap {
            b_bar: d.b_bar,
            b_under: d.b_under,
            eps,
            omega_scale: 1.0,
        }
    }

    pub fn delta(&self) -> f64 {
        self.b_bar - self.b_under
    }

    /// Value and first two ω-derivatives.
    pub fn eval(&self, omega: f64) -> (f64, f64, f64) {
        let w = omega / self.omega_scale;
        let s = 1.0 / self.omega_scale;
        let d = self.delta();
        let lin = self.b_bar - d * w;
        if lin > self.b_bar {
            let (f, f1, f2) = sat((lin - self.b_bar) / self.eps);
            (self.b_bar + self.eps * f, -d * s * f1, d * d * s * s * f2 / self.eps)
        } else if lin < self.b_under {
            let (f, f1, f2) = sat((self.b_under - lin) / self.eps);
            (self.b_under - self.eps * f, -d * s * f1, -d * d * s * s * f2 / self.eps)
        } else {
            (lin, -d * s, 0.0)
        }
    }

    pub fn b(&self, omega: f64) -> f64 {
        self.eval(omega).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let d = design_constants(2.0, 0.9).unwrap();
        assert!((d.r - 0.19 / 3.0).abs() < 1e-15);
        assert!((d.alpha - 0.19 / 12.0).abs() < 1e-15);
        assert!((d.beta - 1.078_189).abs() < 1e-6);
        assert!((d.b_under - 0.992_052).abs() < 1e-6);
        assert!((d.b_bar - 0.992_631).abs() < 1e-6);
        let lhs = d.alpha * 4.0 + d.beta * 0.81;
        assert!((lhs - 0.936_667).abs() < 1e-6);
    }

    #[test]
    fn width_range_enforced() {
        assert_eq!(design_constants(2.0, 1.0), Err(DesignError::Width(1.0)));
        assert!(design_constants(2.0, 0.4).is_err());
        assert!(design_constants(0.0, 0.9).is_err());
    }

    #[test]
    fn degenerates_as_width_approaches_one() {
        let d = design_constants(2.0, 1.0 - 1e-9).unwrap();
        assert!(d.r < 1e-9 && d.alpha < 1e-9 && (d.beta - 1.0).abs() < 1e-8);
        assert!(d.b_under > 1.0 - 1e-8 && d.b_bar > 1.0 - 1e-8);
    }

    #[test]
    fn default_margin_halves_r() {
        let d = design_constants(2.0, 0.9).unwrap();
        let eps = default_margin(&d);
        let kp = kappa(&d, eps) * d.phi_max();
        assert!(kp < d.r / 2.0 && kp > d.r / 2.0 * (1.0 - 1e-9));
        assert!((eps - 2.6e-4).abs() < 1e-5);
    }

    #[test]
    fn extension_is_c2_and_bounded() {
        let d = design_constants(2.0, 0.9).unwrap();
        let m = BMap::new(&d, 1e-3);
        let h = 1e-6;
        let mut w = -3.0;
        while w < 3.0 {
            let (b, b1, b2) = m.eval(w);
            assert!(b >= d.b_under - m.eps - 1e-15 && b <= d.b_bar + m.eps + 1e-15);
            let fd1 = (m.b(w + h) - m.b(w - h)) / (2.0 * h);
            assert!((fd1 - b1).abs() < 1e-7, "w {w}");
            let fd2 = (m.eval(w + h).1 - m.eval(w - h).1) / (2.0 * h);
            assert!((fd2 - b2).abs() < 1e-4 * (1.0 + b2.abs()), "w {w}: {fd2} {b2}");
            w += 0.0137;
        }
        assert_eq!(m.b(0.0), d.b_bar);
        assert!((m.b(1.0) - d.b_under).abs() < 1e-15);
    }
}
