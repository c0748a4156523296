use nalgebra::Vector2;
use num_complex::Complex64;

use super::{symplectic_form, GaussianMixtureState, Ordering, PhasePoint};

/// s-ordered characteristic function `χ^s(y) = χ⁰(y)·exp[s‖y‖²/(4ħ)]` of a
/// Gaussian mixture, with
/// `χ⁰(y) = Σ p_i exp[-(i/ħ)(Ωy)ᵀμ_i − (Ωy)ᵀσ_i(Ωy)/(4ħ²)]`.
pub fn characteristic_function(state: &GaussianMixtureState, s: Ordering, y: PhasePoint) -> Complex64 {
    let hbar = state.hbar();
    let yv: Vector2<f64> = y.to_vector();
    let oy = symplectic_form() * yv;
    let order_factor = (s.value() * yv.norm_squared() / (4.0 * hbar)).exp();
    let mut total = Complex64::new(0.0, 0.0);
    for (w, g) in state.components() {
        let phase = -oy.dot(&g.mu()) / hbar;
        let damping = -(oy.transpose() * g.sigma() * oy)[(0, 0)] / (4.0 * hbar * hbar);
        total += *w * Complex64::from_polar(damping.exp(), phase);
    }
    total * order_factor
}
