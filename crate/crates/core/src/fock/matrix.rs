use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entrywise tolerance for the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A density matrix truncated to the number states `|0⟩ … |N⟩`.
///
/// The matrix is never renormalized; `trace_defect = 1 − Tr ρ` is kept
/// alongside as a measure of the weight lost to truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    entries: DMatrix<Complex64>,
    trace_defect: f64,
}

impl FockMatrix {
    /// Wraps a square Hermitian matrix. The stored matrix is the Hermitian
    /// part of `entries`, which removes rounding noise below the tolerance.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch(entries.nrows(), entries.ncols()));
        }
        if entries.nrows() == 0 {
            return Err(Error::InvalidArgument("empty Fock matrix".into()));
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("Fock matrix"));
        }
        let dim = entries.nrows();
        for m in 0..dim {
            for n in m..dim {
                let gap = (entries[(m, n)] - entries[(n, m)].conj()).norm();
                if gap > HERMITIAN_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not Hermitian: entry ({m}, {n}) differs from its mirror by {gap:e}"
                    )));
                }
            }
        }
        let entries = (&entries + entries.adjoint()) * Complex64::new(0.5, 0.0);
        let trace_defect = 1.0 - entries.diagonal().iter().map(|z| z.re).sum::<f64>();
        Ok(Self { entries, trace_defect })
    }

    /// `|k⟩⟨k|` in a space of dimension `dim`.
    pub fn number_state(k: usize, dim: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::OutOfRange(format!("number state {k} outside dimension {dim}")));
        }
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self::new(m)
    }

    /// Dimension `N + 1`.
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest number state `N` kept.
    pub fn cutoff(&self) -> usize {
        self.dim() - 1
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    pub fn trace(&self) -> f64 {
        1.0 - self.trace_defect
    }

    pub fn trace_defect(&self) -> f64 {
        self.trace_defect
    }

    /// Whether every imaginary part is negligible against the largest entry.
    pub fn is_real(&self) -> bool {
        let scale = self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        self.entries.iter().all(|z| z.im.abs() <= 1e-14 * scale)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = super::trace::hermitian_eigenvalues(&self.entries, self.is_real());
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.entries
    }
}
