use nalgebra::{DMatrix, Matrix2, SymmetricEigen, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cutoff::adaptive_cutoff;
use super::gaussian::gaussian_fock_matrix;
use super::FockMatrix;
use crate::error::{Error, Result};
use crate::phasespace::GaussianMixtureState;

/// Eigenvalues of a Hermitian matrix; real matrices use the cheaper real
/// symmetric solver.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>, real: bool) -> Vec<f64> {
    if real {
        m.map(|z| z.re).symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.symmetric_eigenvalues().iter().copied().collect()
    }
}

/// Trace distance together with the amount removed by clamping to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceDistance {
    pub value: f64,
    /// `raw − value`; nonzero only when round-off pushed the sum past 1.
    pub clamp: f64,
}

/// `½ Σ|λᵢ|` over the eigenvalues of `ρ₁ − ρ₂`.
pub fn trace_distance(rho1: &FockMatrix, rho2: &FockMatrix) -> Result<TraceDistance> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch(rho1.dim(), rho2.dim()));
    }
    let diff = rho1.entries() - rho2.entries();
    let scale = diff.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(TraceDistance { value: 0.0, clamp: 0.0 });
    }
    let real = diff.iter().all(|z| z.im.abs() <= 1e-14 * scale);
    let raw = 0.5 * hermitian_eigenvalues(&diff, real).iter().map(|l| l.abs()).sum::<f64>();
    if !raw.is_finite() {
        return Err(Error::NonFinite("trace distance"));
    }
    let value = raw.clamp(0.0, 1.0);
    Ok(TraceDistance { value, clamp: raw - value })
}

/// Best probability of telling two equiprobable states apart, `(1 + d)/2`.
pub fn optimal_discrimination_probability(d_tr: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&d_tr) {
        return Err(Error::OutOfRange(format!("trace distance {d_tr} outside [0, 1]")));
    }
    Ok(0.5 * (1.0 + d_tr))
}

/// Truncation settings for trace distances of Gaussian-mixed states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockOptions {
    pub defect_tol: f64,
    pub max_cutoff: usize,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self { defect_tol: 1e-6, max_cutoff: 1024 }
    }
}

/// Trace distance of two states with the truncation that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateTraceDistance {
    pub value: f64,
    pub clamp: f64,
    pub cutoff: usize,
    /// Larger of the two trace defects.
    pub defect: f64,
}

/// Symplectic map `x ↦ S x + shift` that centres the pair, whitens the
/// average covariance to a multiple of the identity and rotates the
/// difference of the means onto the `q` axis.
///
/// The trace distance is invariant under it (the map is a Gaussian
/// unitary) while the number of Fock states needed to represent both states
/// is typically much smaller, and equal-covariance pairs end up with real
/// matrix elements.
pub fn canonical_frame(a: &GaussianMixtureState, b: &GaussianMixtureState) -> (Matrix2<f64>, Vector2<f64>) {
    let moments = |st: &GaussianMixtureState| {
        st.components().iter().fold((Vector2::zeros(), Matrix2::zeros()), |(m, c), (w, g)| {
            (m + g.mu() * *w, c + g.sigma() * *w)
        })
    };
    let (ma, ca) = moments(a);
    let (mb, cb) = moments(b);
    let centre = 0.5 * (ma + mb);
    let cbar = 0.5 * (ca + cb);
    let eig = SymmetricEigen::new(cbar);
    let nu = cbar.determinant().sqrt();
    let inv_sqrt = eig.eigenvectors
        * Matrix2::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
        * eig.eigenvectors.transpose();
    let whiten = inv_sqrt * nu.sqrt();
    let d = whiten * (ma - mb);
    let theta = -d[1].atan2(d[0]);
    let (sn, cs) = theta.sin_cos();
    let s = Matrix2::new(cs, -sn, sn, cs) * whiten;
    (s, -(s * centre))
}

/// Trace distance between two Gaussian-mixed states.
///
/// Both states are moved to the [`canonical_frame`], truncated at the
/// smallest cutoff that keeps each trace defect within `defect_tol`, and
/// their closed-form number-basis matrices are compared.
pub fn trace_distance_states(
    a: &GaussianMixtureState,
    b: &GaussianMixtureState,
    opts: &FockOptions,
) -> Result<StateTraceDistance> {
    if a.hbar() != b.hbar() {
        return Err(Error::InvalidArgument("states use different values of ħ".into()));
    }
    if a == b {
        return Ok(StateTraceDistance { value: 0.0, clamp: 0.0, cutoff: 0, defect: 0.0 });
    }
    let (s, shift) = canonical_frame(a, b);
    let ta = a.transformed(&s, &shift)?;
    let tb = b.transformed(&s, &shift)?;
    let cutoff = adaptive_cutoff(&ta, opts.defect_tol, opts.max_cutoff)?
        .max(adaptive_cutoff(&tb, opts.defect_tol, opts.max_cutoff)?);
    let ra = gaussian_fock_matrix(&ta, cutoff)?;
    if is_parity_image(&ta, &tb) {
        let defect = ra.trace_defect();
        if defect > opts.defect_tol {
            return Err(Error::CutoffTooSmall { cutoff, defect, tol: opts.defect_tol });
        }
        let d = parity_trace_distance(&ra)?;
        return Ok(StateTraceDistance { value: d.value, clamp: d.clamp, cutoff, defect });
    }
    let rb = gaussian_fock_matrix(&tb, cutoff)?;
    let defect = ra.trace_defect().max(rb.trace_defect());
    if defect > opts.defect_tol {
        return Err(Error::CutoffTooSmall { cutoff, defect, tol: opts.defect_tol });
    }
    let d = trace_distance(&ra, &rb)?;
    Ok(StateTraceDistance { value: d.value, clamp: d.clamp, cutoff, defect })
}

/// Whether `b` is the image of `a` under `x ↦ −x`, component by component.
fn is_parity_image(a: &GaussianMixtureState, b: &GaussianMixtureState) -> bool {
    let (ca, cb) = (a.components(), b.components());
    ca.len() == cb.len()
        && ca.iter().zip(cb).all(|((wa, ga), (wb, gb))| {
            let scale = ga.sigma().abs().max() + ga.mu().abs().max();
            wa == wb
                && (ga.sigma() - gb.sigma()).abs().max() <= 1e-14 * scale
                && (ga.mu() + gb.mu()).abs().max() <= 1e-14 * scale
        })
}

/// Trace distance between `ρ` and `ΠρΠ`, with `Π` the parity operator.
///
/// The difference only couples even to odd number states, so in that
/// ordering it is `[[0, X], [X†, 0]]` with `X = 2ρ_{even, odd}` and its
/// eigenvalues are `±` the singular values of `X`.
pub fn parity_trace_distance(rho: &FockMatrix) -> Result<TraceDistance> {
    let n = rho.dim();
    let (ne, no) = (n.div_ceil(2), n / 2);
    if no == 0 {
        return Ok(TraceDistance { value: 0.0, clamp: 0.0 });
    }
    let e = rho.entries();
    let raw = if rho.is_real() {
        DMatrix::from_fn(ne, no, |i, j| 2.0 * e[(2 * i, 2 * j + 1)].re).singular_values().sum()
    } else {
        DMatrix::from_fn(ne, no, |i, j| e[(2 * i, 2 * j + 1)] * 2.0).singular_values().sum()
    };
    if !raw.is_finite() {
        return Err(Error::NonFinite("trace distance"));
    }
    let value = raw.clamp(0.0, 1.0);
    Ok(TraceDistance { value, clamp: raw - value })
}
