//! Truncated number-basis density matrices and trace distances.
//!
//! Matrices can be synthesized from a Wigner function through the frame
//! decomposition `ρ = 2πħ ∫ dx W(x) T⁰(x)` ([`density_from_wigner`]) or built
//! in closed form for Gaussian-mixed states ([`gaussian_fock_matrix`]). The
//! quadrature route serves as an independent check of the closed form; the
//! closed form is what [`trace_distance_states`] uses.

mod cutoff;
mod displacement;
mod gaussian;
mod kernel;
mod matrix;
mod trace;

pub use cutoff::{adaptive_cutoff, cutoff_estimate, DEFAULT_HARD_LIMIT};
pub use displacement::{displacement_matrix, displacement_matrix_element};
pub use gaussian::gaussian_fock_matrix;
pub use kernel::{
    density_from_wigner, density_from_wigner_default, synthesis_grid, synthesis_weight, t0_kernel_element,
    t0_normalization, PointKernelT0,
};
pub use matrix::{FockMatrix, HERMITIAN_TOL};
pub use trace::{
    canonical_frame, optimal_discrimination_probability, parity_trace_distance, trace_distance, trace_distance_states, FockOptions,
    StateTraceDistance, TraceDistance,
};
