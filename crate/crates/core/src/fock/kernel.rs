//! The Wigner frame `T⁰(x)` on the truncated number basis, and density
//! matrix synthesis from a Wigner function by quadrature of the frame
//! decomposition.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::displacement::{displacement_matrix_element, fill_displacement};
use super::FockMatrix;
use crate::error::{Error, Result};
use crate::par;
use crate::phasespace::{
    complex_coords, GaussianMixtureState, Ordering, PhaseGrid, PhasePoint, DEFAULT_EXTENT_K, DEFAULT_NODES,
};

/// Prefactor `c` in `T⁰(x) = c·D(2α) Π`, chosen so that `W(x) = Tr[T⁰(x) ρ]`
/// is normalized to one over `dq dp`.
pub fn t0_normalization(hbar: f64) -> f64 {
    1.0 / (PI * hbar)
}

/// Weight of the dual frame: `ρ = 2πħ ∫ dx W(x) T⁰(x)`.
pub fn synthesis_weight(hbar: f64) -> f64 {
    2.0 * PI * hbar
}

/// `⟨m|T⁰(x)|n⟩ = c (−1)ⁿ ⟨m|D(2α(x))|n⟩`.
pub fn t0_kernel_element(m: usize, n: usize, x: PhasePoint, hbar: f64) -> Result<Complex64> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument("ħ must be positive".into()));
    }
    let d = displacement_matrix_element(m, n, 2.0 * complex_coords(x, hbar))?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(d * (sign * t0_normalization(hbar)))
}

/// All elements `⟨m|T⁰(x)|n⟩` with `m, n ≤ N` at one phase-space point.
#[derive(Debug, Clone)]
pub struct PointKernelT0 {
    x: PhasePoint,
    hbar: f64,
    values: DMatrix<Complex64>,
}

impl PointKernelT0 {
    pub fn new(x: PhasePoint, hbar: f64, cutoff: usize) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument("ħ must be positive".into()));
        }
        let dim = cutoff + 1;
        let mut values = DMatrix::zeros(dim, dim);
        fill_kernel(values.as_mut_slice(), dim, x, hbar, t0_normalization(hbar));
        Ok(Self { x, hbar, values })
    }

    pub fn point(&self) -> PhasePoint {
        self.x
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn element(&self, m: usize, n: usize) -> Complex64 {
        self.values[(m, n)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    /// `Tr[T⁰(x) ρ]`, the Wigner function of a truncated density matrix.
    pub fn wigner(&self, rho: &FockMatrix) -> Result<f64> {
        if rho.dim() != self.values.nrows() {
            return Err(Error::DimensionMismatch(rho.dim(), self.values.nrows()));
        }
        let r = rho.entries();
        let dim = rho.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..dim {
            for n in 0..dim {
                acc += self.values[(m, n)] * r[(n, m)];
            }
        }
        Ok(acc.re)
    }
}

/// Column-major `scale·(−1)ⁿ⟨m|D(2α)|n⟩` into `out`.
fn fill_kernel(out: &mut [Complex64], dim: usize, x: PhasePoint, hbar: f64, scale: f64) {
    fill_displacement(out, dim, 2.0 * complex_coords(x, hbar));
    for n in 0..dim {
        let f = if n % 2 == 0 { scale } else { -scale };
        for z in &mut out[n * dim..(n + 1) * dim] {
            *z *= f;
        }
    }
}

/// Grid covering the Wigner function of `state` with the default padding.
pub fn synthesis_grid(state: &GaussianMixtureState, nodes: usize) -> Result<PhaseGrid> {
    let w = state.quasi_distribution(Ordering::WIGNER)?;
    PhaseGrid::covering(&[&w], DEFAULT_EXTENT_K, nodes)
}

/// `ρ_mn = 2πħ Σ_x w(x) W(x) ⟨m|T⁰(x)|n⟩` by trapezoidal quadrature.
///
/// The matrix is not renormalized. If the captured trace falls short of one
/// by more than `defect_tol` the cutoff is too small and an error carrying
/// the defect is returned.
pub fn density_from_wigner(
    state: &GaussianMixtureState,
    cutoff: usize,
    grid: &PhaseGrid,
    defect_tol: f64,
) -> Result<FockMatrix> {
    let hbar = state.hbar();
    let w = state.quasi_distribution(Ordering::WIGNER)?;
    let dim = cutoff + 1;
    let cell = grid.step_q() * grid.step_p();
    let scale = synthesis_weight(hbar) * t0_normalization(hbar) * cell;
    // One partial sum per grid row, reduced in row order afterwards so the
    // result does not depend on scheduling.
    let rows = par::map_range(grid.n_p, |j| {
        let p = grid.p(j);
        let mut acc = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut buf = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..grid.n_q {
            let q = grid.q(i);
            let wx = grid.weight(i, j) * w.eval_qp(q, p);
            if wx == 0.0 {
                continue;
            }
            fill_kernel(&mut buf, dim, PhasePoint { q, p }, hbar, scale * wx);
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += b;
            }
        }
        acc
    });
    let mut total = vec![Complex64::new(0.0, 0.0); dim * dim];
    for row in rows {
        for (a, b) in total.iter_mut().zip(&row) {
            *a += b;
        }
    }
    let rho = FockMatrix::new(DMatrix::from_vec(dim, dim, total))?;
    if rho.trace_defect() > defect_tol {
        return Err(Error::CutoffTooSmall { cutoff, defect: rho.trace_defect(), tol: defect_tol });
    }
    Ok(rho)
}

/// [`density_from_wigner`] on the default grid for the state.
pub fn density_from_wigner_default(state: &GaussianMixtureState, cutoff: usize, defect_tol: f64) -> Result<FockMatrix> {
    let grid = synthesis_grid(state, DEFAULT_NODES)?;
    density_from_wigner(state, cutoff, &grid, defect_tol)
}
