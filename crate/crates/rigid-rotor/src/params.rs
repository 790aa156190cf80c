use algebra_core::{modified_kk_data, rigid_body_data, KKData, ModifiedKK};

use crate::RigidError;

/// Rigid-body moments `I` and rotor moments `i` (with i₁ = i₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorParams {
    pub big_i: [f64; 3],
    pub small_i: [f64; 3],
}

impl Default for RotorParams {
    /// Repo convention used by the demos and tests; not taken from any reference.
    fn default() -> Self {
        RotorParams {
            big_i: [3.0, 2.0, 1.0],
            small_i: [0.1, 0.1, 0.05],
        }
    }
}

impl RotorParams {
    pub fn new(big_i: [f64; 3], small_i: [f64; 3]) -> Result<Self, RigidError> {
        let p = RotorParams { big_i, small_i };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), RigidError> {
        let [a, b, c] = self.big_i;
        let [i1, i2, i3] = self.small_i;
        if !(a > b && b > c && c > 0.0) {
            return Err(RigidError::Params(format!(
                "need I1 > I2 > I3 > 0, got {:?}",
                self.big_i
            )));
        }
        if i1 != i2 || !(i2 > i3 && i3 > 0.0) {
            return Err(RigidError::Params(format!(
                "need i1 = i2 > i3 > 0, got {:?}",
                self.small_i
            )));
        }
        Ok(())
    }

    /// λⱼ = Iⱼ + iⱼ.
    pub fn lambda(&self) -> [f64; 3] {
        [
            self.big_i[0] + self.small_i[0],
            self.big_i[1] + self.small_i[1],
            self.big_i[2] + self.small_i[2],
        ]
    }

    pub fn i3(&self) -> f64 {
        self.small_i[2]
    }

    /// The third rigid moment I₃ = λ₃ − i₃.
    pub fn big_i3(&self) -> f64 {
        self.big_i[2]
    }

    pub fn kk_data(&self) -> KKData {
        rigid_body_data(self.lambda(), self.i3())
    }

    pub fn scaled(&self, c: f64) -> Self {
        RotorParams {
            big_i: self.big_i.map(|v| v * c),
            small_i: self.small_i.map(|v| v * c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidState {
    pub pi: [f64; 3],
    pub q: f64,
}

/// Feedback `q = p_k + kΠ₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlGainK {
    pub k: f64,
    pub p_k: f64,
}

impl ControlGainK {
    pub fn new(k: f64, p_k: f64) -> Result<Self, RigidError> {
        if k == 1.0 {
            return Err(RigidError::GainIsOne);
        }
        Ok(ControlGainK { k, p_k })
    }

    /// 𝕀_k = i₃(1 − k).
    pub fn inertia_k(&self, p: &RotorParams) -> f64 {
        p.i3() * (1.0 - self.k)
    }

    /// φ_k = (i₃ − kλ₃)/𝕀_k.
    pub fn phi_k(&self, p: &RotorParams) -> f64 {
        (p.i3() - self.k * p.lambda()[2]) / self.inertia_k(p)
    }

    /// p̃_k = i₃p_k/(i₃ − kλ₃).
    pub fn p_tilde(&self, p: &RotorParams) -> f64 {
        p.i3() * self.p_k / (p.i3() - self.k * p.lambda()[2])
    }

    /// γ for which the controlled Kaluza-Klein data give C = −k e₃ᵀ.
    ///
    /// With R = 1 − γ i₃/I₃ this is γ = −kI₃/(i₃(1 − k)); then 1 + γ = φ_k.
    pub fn gamma(&self, p: &RotorParams) -> f64 {
        -self.k * p.big_i3() / (p.i3() * (1.0 - self.k))
    }

    pub fn modified(&self, p: &RotorParams) -> Result<ModifiedKK, algebra_core::AlgebraError> {
        modified_kk_data(&p.kk_data(), self.gamma(p))
    }
}
