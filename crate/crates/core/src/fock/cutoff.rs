use super::gaussian::gaussian_fock_matrix;
use crate::error::{Error, Result};
use crate::phasespace::GaussianMixtureState;

/// Default upper bound for [`adaptive_cutoff`].
pub const DEFAULT_HARD_LIMIT: usize = 256;

/// Initial guess `⌈E + 6√E⌉` with `E = maxᵢ(‖μᵢ‖²/2 + tr σᵢ/2)/ħ`.
pub fn cutoff_estimate(state: &GaussianMixtureState) -> usize {
    let hbar = state.hbar();
    let e = state
        .components()
        .iter()
        .map(|(_, g)| (0.5 * g.mu().norm_squared() + 0.5 * g.sigma().trace()) / hbar)
        .fold(0.0, f64::max);
    (e + 6.0 * e.sqrt()).ceil().max(1.0) as usize
}

/// Smallest cutoff `N` whose captured trace `Σ_{n≤N} ρ_nn` reaches
/// `1 − defect_tol`.
///
/// The populations come from the closed-form Gaussian matrix elements, so
/// the returned `N` is exact rather than a heuristic bound. The search
/// starts at [`cutoff_estimate`] and doubles up to `hard_limit`.
pub fn adaptive_cutoff(state: &GaussianMixtureState, defect_tol: f64, hard_limit: usize) -> Result<usize> {
    if !(defect_tol > 0.0 && defect_tol < 1.0) {
        return Err(Error::InvalidArgument(format!("defect tolerance {defect_tol} outside (0, 1)")));
    }
    let mut guess = cutoff_estimate(state).min(hard_limit);
    loop {
        let rho = gaussian_fock_matrix(state, guess)?;
        let mut captured = 0.0;
        for n in 0..=guess {
            captured += rho.get(n, n).re;
            if captured >= 1.0 - defect_tol {
                return Ok(n);
            }
        }
        if guess >= hard_limit {
            return Err(Error::InfeasibleCutoff { limit: hard_limit });
        }
        guess = (2 * guess).min(hard_limit);
    }
}
