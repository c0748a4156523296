//! Kolmogorov distance `½∫|W₁ − W₂|` between phase-space distributions.

use nalgebra::{Matrix2, Vector2};
use libm::erf;
use serde::{Deserialize, Serialize};

use super::grid::{DEFAULT_EXTENT_K, DEFAULT_NODES};
use super::{GaussianMixtureState, Ordering, PhaseDensity, PhaseGrid};
use crate::error::{Error, Result};
use crate::par;

/// Default refinement tolerance for distances.
pub const DEFAULT_REFINE_TOL: f64 = 1e-4;
/// Finest node count per axis (2048 intervals).
pub const MAX_NODES: usize = 2049;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KolmogorovOptions {
    pub refine_tol: f64,
    pub max_nodes: usize,
}

impl Default for KolmogorovOptions {
    fn default() -> Self {
        Self { refine_tol: DEFAULT_REFINE_TOL, max_nodes: MAX_NODES }
    }
}

impl KolmogorovOptions {
    pub fn with_tol(refine_tol: f64) -> Self {
        Self { refine_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KolmogorovEstimate {
    pub value: f64,
    /// Estimate of the previous refinement level.
    pub previous: f64,
    /// Nodes per axis at the accepted level.
    pub nodes: usize,
}

/// Trapezoidal estimate of `½∫|W₁ − W₂|` on `grid`, halving the spacing
/// until two consecutive levels agree to `refine_tol`.
///
/// Levels are nested, so each refinement only evaluates the new nodes.
/// Row sums are reduced in index order and the result does not depend on
/// the thread count.
pub fn kolmogorov_distance<A, B>(w1: &A, w2: &B, grid: &PhaseGrid, opts: &KolmogorovOptions) -> Result<KolmogorovEstimate>
where
    A: PhaseDensity + ?Sized,
    B: PhaseDensity + ?Sized,
{
    if !(opts.refine_tol > 0.0) {
        return Err(Error::InvalidArgument("refine_tol must be positive".into()));
    }
    let diff = |q: f64, p: f64| (w1.density(q, p) - w2.density(q, p)).abs();

    let mut level = *grid;
    let mut raw = par::ordered_sum(level.n_p, |j| {
        let p = level.p(j);
        (0..level.n_q).map(|i| level.weight(i, j) * diff(level.q(i), p)).sum::<f64>()
    });
    let mut estimate = 0.5 * raw * level.step_q() * level.step_p();
    let mut previous = f64::NAN;

    while level.n_q.max(level.n_p) < opts.max_nodes {
        let fine = level.refined();
        // Nodes with an even index on both axes were already summed; the
        // trapezoid weights of surviving nodes are unchanged by nesting.
        let added = par::ordered_sum(fine.n_p, |j| {
            let p = fine.p(j);
            if j % 2 == 1 {
                (0..fine.n_q).map(|i| fine.weight(i, j) * diff(fine.q(i), p)).sum::<f64>()
            } else {
                (1..fine.n_q).step_by(2).map(|i| fine.weight(i, j) * diff(fine.q(i), p)).sum::<f64>()
            }
        });
        raw += added;
        level = fine;
        previous = estimate;
        estimate = 0.5 * raw * level.step_q() * level.step_p();
        if (estimate - previous).abs() < opts.refine_tol {
            return Ok(KolmogorovEstimate {
                value: estimate.clamp(0.0, 1.0 + opts.refine_tol),
                previous,
                nodes: level.n_q,
            });
        }
    }
    Err(Error::QuadratureFailure { previous, last: estimate })
}

/// Closed form for two Gaussians sharing the covariance `cov`:
/// `erf(√(Δμᵀ cov⁻¹ Δμ) / 2)`.
pub fn gaussian_pair_kolmogorov(mu1: &Vector2<f64>, mu2: &Vector2<f64>, cov: &Matrix2<f64>) -> Result<f64> {
    let inv = cov
        .try_inverse()
        .ok_or(Error::DegenerateCovariance { det: cov.determinant() })?;
    let d = mu1 - mu2;
    let m2 = (d.transpose() * inv * d)[(0, 0)];
    if !(m2 >= 0.0) {
        return Err(Error::DegenerateCovariance { det: cov.determinant() });
    }
    Ok(erf(0.5 * m2.sqrt()))
}

/// Kolmogorov distance between the s-ordered distributions of two states.
///
/// Identical states give 0 without quadrature. Two single Gaussians with the
/// same covariance use [`gaussian_pair_kolmogorov`]; anything else goes
/// through [`kolmogorov_distance`] on a grid chosen by the extent policy.
pub fn kolmogorov_distance_states(
    a: &GaussianMixtureState,
    b: &GaussianMixtureState,
    s: Ordering,
    opts: &KolmogorovOptions,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let wa = a.quasi_distribution(s)?;
    let wb = b.quasi_distribution(s)?;
    if let ([(_, mu1, c1)], [(_, mu2, c2)]) = (wa.components(), wb.components()) {
        if c1 == c2 {
            return gaussian_pair_kolmogorov(mu1, mu2, c1);
        }
    }
    kolmogorov_quadrature_states(a, b, s, opts)
}

/// Grid-quadrature route for two states, skipping any closed form.
pub fn kolmogorov_quadrature_states(
    a: &GaussianMixtureState,
    b: &GaussianMixtureState,
    s: Ordering,
    opts: &KolmogorovOptions,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let wa = a.quasi_distribution(s)?;
    let wb = b.quasi_distribution(s)?;
    let grid = PhaseGrid::covering(&[&wa, &wb], DEFAULT_EXTENT_K, DEFAULT_NODES)?;
    Ok(kolmogorov_distance(&wa, &wb, &grid, opts)?.value)
}
