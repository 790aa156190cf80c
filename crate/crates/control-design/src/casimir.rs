use crate::control::ShearControl;
use crate::quad::{gauss5, simpson};

const SIMPSON_POINTS: usize = 10_000;

/// Casimir of the controlled system: Ψ_C(ω) = −∫₀^ω dη/Φ_γ(η), φ_C(τ) = ∫₀^τ Ψ_C.
#[derive(Debug, Clone)]
pub struct CasimirProfile {
    control: ShearControl,
}

pub fn casimir_profile(control: &ShearControl) -> CasimirProfile {
    CasimirProfile {
        control: control.clone(),
    }
}

impl CasimirProfile {
    /// φ_C″(ω) = −1/Φ_γ(ω).
    pub fn phi_c_second(&self, w: f64) -> f64 {
        -1.0 / self.control.phi_of_omega(w)
    }

    pub fn psi_c(&self, w: f64) -> f64 {
        simpson(|s| self.phi_c_second(s), 0.0, w, SIMPSON_POINTS)
    }

    pub fn phi_c(&self, w: f64) -> f64 {
        // Integration by parts: ∫₀^τ Ψ_C = ∫₀^τ (τ − s)Ψ_C′(s) ds.
        simpson(|s| (w - s) * self.phi_c_second(s), 0.0, w, SIMPSON_POINTS)
    }

    /// φ_C(ω) − φ_C(ω_e) − Ψ_C(ω_e)(ω − ω_e), integrated directly so that no
    /// cancellation occurs for small perturbations.
    pub fn remainder(&self, w_e: f64, w: f64) -> f64 {
        let d = w - w_e;
        if d == 0.0 {
            return 0.0;
        }
        let pieces = ((d.abs() / 0.05).ceil() as usize).max(1);
        let h = d / pieces as f64;
        (0..pieces)
            .map(|i| {
                let a = w_e + i as f64 * h;
                gauss5(|s| (w - s) * self.phi_c_second(s), a, a + h)
            })
            .sum()
    }
}
