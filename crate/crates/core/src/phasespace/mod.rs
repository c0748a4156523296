//! Gaussian-mixed states on phase space, their s-ordered quasi-probability
//! distributions, and Kolmogorov distances between them.

mod characteristic;
mod gaussian;
mod grid;
mod kolmogorov;
mod ordering;
mod point;

pub use characteristic::characteristic_function;
pub use gaussian::{
    gaussian_density, gaussian_pdf, quasiprob, sym_eigenvalues, GaussianComponent, GaussianMixtureState,
    QuasiDistribution,
};
pub use grid::{PhaseGrid, SampledDistribution, DEFAULT_EXTENT_K, DEFAULT_NODES};
pub use kolmogorov::{
    gaussian_pair_kolmogorov, kolmogorov_distance, kolmogorov_distance_states, kolmogorov_quadrature_states,
    KolmogorovEstimate, KolmogorovOptions, DEFAULT_REFINE_TOL, MAX_NODES,
};
pub use ordering::Ordering;
pub use point::{complex_coords, phase_point_from_complex, symplectic_form, PhasePoint};

/// Anything that can be evaluated pointwise on phase space.
pub trait PhaseDensity: Sync {
    fn density(&self, q: f64, p: f64) -> f64;
}

/// Adapter turning a closure into a [`PhaseDensity`].
pub struct FnDensity<F>(pub F);

impl<F> PhaseDensity for FnDensity<F>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    fn density(&self, q: f64, p: f64) -> f64 {
        (self.0)(q, p)
    }
}
