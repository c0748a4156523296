//! Exact Gaussian dynamics of a damped harmonic oscillator coupled to an
//! Ohmic bath with Lorentz–Drude cutoff.

mod evolve;
mod greens;
mod noise;
mod params;

pub use evolve::{evolve_state, trajectory, validate_time_grid, GaussianTrajectory, Propagator};
pub use greens::{default_oracle_step, greens_function, greens_function_volterra_oracle, GreensFunction, DEGENERACY_TOL};
pub use noise::{noise_integrals_quadrature, noise_kernel, noise_kernel_series, NoiseIntegrals};
pub use params::{noise_spectrum, spectral_density, CLParams};
