//! Gaussian components, Gaussian-mixed states and their s-ordered
//! quasi-probability distributions.
//!
//! Covariances follow the convention in which a Gaussian density reads
//! `exp[-(x-μ)ᵀ σ⁻¹ (x-μ)] / (π √det σ)`, so `σ` is twice the usual
//! second-moment matrix and the vacuum has `σ = ħ·1`.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::{Ordering, PhasePoint};
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues `(λ_min, λ_max)` of a symmetric 2×2 matrix.
pub fn sym_eigenvalues(m: &Matrix2<f64>) -> (f64, f64) {
    let a = m[(0, 0)];
    let d = m[(1, 1)];
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    (mean - r, mean + r)
}

fn check_symmetric(m: &Matrix2<f64>) -> Result<()> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("covariance"));
    }
    let scale = m.abs().max().max(f64::MIN_POSITIVE);
    if (m[(0, 1)] - m[(1, 0)]).abs() > SYMMETRY_TOL * scale {
        return Err(Error::InvalidArgument("covariance matrix is not symmetric".into()));
    }
    Ok(())
}

/// Normalized 2D Gaussian with mean `mu` and covariance `cov` at `x`.
pub fn gaussian_density(x: &Vector2<f64>, mu: &Vector2<f64>, cov: &Matrix2<f64>) -> Result<f64> {
    let det = cov.determinant();
    if !(det > 0.0) || cov[(0, 0)] <= 0.0 {
        return Err(Error::DegenerateCovariance { det });
    }
    Ok(density_unchecked(x, mu, cov, det))
}

#[inline]
fn density_unchecked(x: &Vector2<f64>, mu: &Vector2<f64>, cov: &Matrix2<f64>, det: f64) -> f64 {
    let d = x - mu;
    // cov⁻¹ = adj(cov) / det
    let quad = (cov[(1, 1)] * d[0] * d[0] - (cov[(0, 1)] + cov[(1, 0)]) * d[0] * d[1] + cov[(0, 0)] * d[1] * d[1]) / det;
    (-quad).exp() / (std::f64::consts::PI * det.sqrt())
}

/// One Gaussian state: displacement `mu` and covariance `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    mu: Vector2<f64>,
    sigma: Matrix2<f64>,
}

impl GaussianComponent {
    /// Validates finiteness, symmetry and positive definiteness of `sigma`.
    pub fn new(mu: Vector2<f64>, sigma: Matrix2<f64>) -> Result<Self> {
        if mu.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("displacement"));
        }
        check_symmetric(&sigma)?;
        let sym = 0.5 * (sigma + sigma.transpose());
        let (lo, _) = sym_eigenvalues(&sym);
        if !(lo > 0.0) {
            return Err(Error::DegenerateCovariance { det: sym.determinant() });
        }
        Ok(Self { mu, sigma: sym })
    }

    /// Like [`new`](Self::new) but also requires a physical quantum state:
    /// `det σ ≥ ħ²`, which for one mode is equivalent to `σ + iħΩ ⪰ 0`.
    pub fn new_physical(mu: Vector2<f64>, sigma: Matrix2<f64>, hbar: f64) -> Result<Self> {
        let g = Self::new(mu, sigma)?;
        if !g.is_physical(hbar) {
            return Err(Error::InvalidArgument(format!(
                "covariance violates the uncertainty relation (det = {:e} < ħ² = {:e})",
                g.sigma.determinant(),
                hbar * hbar
            )));
        }
        Ok(g)
    }

    /// Coherent state centred at `mu` (`σ = ħ·1`).
    pub fn coherent(mu: Vector2<f64>, hbar: f64) -> Result<Self> {
        Self::new(mu, Matrix2::identity() * hbar)
    }

    /// Thermal state with mean occupation `nbar` displaced to `mu`.
    pub fn thermal(mu: Vector2<f64>, nbar: f64, hbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) {
            return Err(Error::InvalidArgument("mean occupation must be non-negative".into()));
        }
        Self::new(mu, Matrix2::identity() * ((2.0 * nbar + 1.0) * hbar))
    }

    pub fn mu(&self) -> Vector2<f64> {
        self.mu
    }

    pub fn sigma(&self) -> Matrix2<f64> {
        self.sigma
    }

    pub fn is_physical(&self, hbar: f64) -> bool {
        self.sigma.determinant() >= hbar * hbar * (1.0 - 1e-12)
    }

    /// Covariance of the s-ordered distribution, `σ − sħ·1`, if positive definite.
    pub fn ordered_covariance(&self, s: Ordering, hbar: f64) -> Result<Matrix2<f64>> {
        let c = self.sigma - Matrix2::identity() * (s.value() * hbar);
        let (lo, hi) = sym_eigenvalues(&c);
        if !(lo > 1e-14 * hi.abs().max(hbar)) {
            return Err(Error::SingularOrdering { s: s.value(), min_eig: lo });
        }
        Ok(c)
    }

    /// Same state with covariance multiplied by `factor`.
    pub fn scaled_covariance(&self, factor: f64) -> Result<Self> {
        Self::new(self.mu, self.sigma * factor)
    }

    /// Image under the affine map `x ↦ S x + shift`.
    pub fn transformed(&self, s: &Matrix2<f64>, shift: &Vector2<f64>) -> Result<Self> {
        let sigma = s * self.sigma * s.transpose();
        Self::new(s * self.mu + shift, 0.5 * (sigma + sigma.transpose()))
    }
}

/// Normalized Gaussian `N_{μ,σ}(x) = exp[-(x-μ)ᵀσ⁻¹(x-μ)] / (π √det σ)`.
pub fn gaussian_pdf(x: PhasePoint, g: &GaussianComponent) -> Result<f64> {
    gaussian_density(&x.to_vector(), &g.mu, &g.sigma)
}

/// Convex combination of Gaussian states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixtureState {
    components: Vec<(f64, GaussianComponent)>,
    hbar: f64,
}

impl GaussianMixtureState {
    pub fn new(components: Vec<(f64, GaussianComponent)>, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument("ħ must be positive".into()));
        }
        if components.is_empty() {
            return Err(Error::InvalidArgument("mixture needs at least one component".into()));
        }
        if components.iter().any(|(w, _)| !(*w > 0.0)) {
            return Err(Error::InvalidArgument("mixture weights must be positive".into()));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(Self { components, hbar })
    }

    pub fn single(g: GaussianComponent, hbar: f64) -> Result<Self> {
        Self::new(vec![(1.0, g)], hbar)
    }

    pub fn components(&self) -> &[(f64, GaussianComponent)] {
        &self.components
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn is_physical(&self) -> bool {
        self.components.iter().all(|(_, g)| g.is_physical(self.hbar))
    }

    /// The s-ordered quasi-probability distribution as explicit Gaussians.
    pub fn quasi_distribution(&self, s: Ordering) -> Result<QuasiDistribution> {
        let components = self
            .components
            .iter()
            .map(|(w, g)| Ok((*w, g.mu, g.ordered_covariance(s, self.hbar)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuasiDistribution::from_parts(components, s, self.hbar))
    }

    /// Every covariance multiplied by `factor`; used to approach the limit of
    /// classical uncertainty.
    pub fn scaled_covariances(&self, factor: f64) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|(w, g)| Ok((*w, g.scaled_covariance(factor)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(components, self.hbar)
    }

    /// Image of every component under `x ↦ S x + shift`. For `det S = 1`
    /// this is the action of a Gaussian unitary on the state.
    pub fn transformed(&self, s: &Matrix2<f64>, shift: &Vector2<f64>) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|(w, g)| Ok((*w, g.transformed(s, shift)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(components, self.hbar)
    }
}

/// `W^s(x) = Σ p_i N_{μ_i, σ_i − sħ1}(x)`.
pub fn quasiprob(state: &GaussianMixtureState, s: Ordering, x: PhasePoint) -> Result<f64> {
    let v = x.to_vector();
    let mut total = 0.0;
    for (w, g) in state.components() {
        let c = g.ordered_covariance(s, state.hbar())?;
        total += w * density_unchecked(&v, &g.mu, &c, c.determinant());
    }
    Ok(total)
}

/// A quasi-probability distribution that is a finite sum of Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiDistribution {
    components: Vec<(f64, Vector2<f64>, Matrix2<f64>)>,
    dets: Vec<f64>,
    order: Ordering,
    hbar: f64,
}

impl QuasiDistribution {
    fn from_parts(components: Vec<(f64, Vector2<f64>, Matrix2<f64>)>, order: Ordering, hbar: f64) -> Self {
        let dets = components.iter().map(|(_, _, c)| c.determinant()).collect();
        Self { components, dets, order, hbar }
    }

    pub fn order(&self) -> Ordering {
        self.order
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `(weight, mean, covariance)` of each Gaussian term.
    pub fn components(&self) -> &[(f64, Vector2<f64>, Matrix2<f64>)] {
        &self.components
    }

    pub fn eval(&self, x: PhasePoint) -> f64 {
        self.eval_qp(x.q, x.p)
    }

    #[inline]
    pub fn eval_qp(&self, q: f64, p: f64) -> f64 {
        let v = Vector2::new(q, p);
        self.components
            .iter()
            .zip(&self.dets)
            .map(|((w, mu, c), det)| w * density_unchecked(&v, mu, c, *det))
            .sum()
    }

    /// Convolve with `N_{0,(s−r)ħ1}` to obtain the distribution of order
    /// `r < s`. Exact for Gaussian sums: each covariance grows by `(s−r)ħ1`.
    pub fn reorder(&self, target: Ordering) -> Result<QuasiDistribution> {
        let s = self.order.value();
        let r = target.value();
        if !(r < s) {
            return Err(Error::OrderingDirection { from: s, to: r });
        }
        let widen = Matrix2::identity() * ((s - r) * self.hbar);
        let components = self.components.iter().map(|(w, mu, c)| (*w, *mu, c + widen)).collect();
        Ok(Self::from_parts(components, target, self.hbar))
    }

    /// Bounding box of all means padded by `k·√λ_max` of the widest term.
    pub fn extent(&self, k: f64) -> [f64; 4] {
        let lmax = self
            .components
            .iter()
            .map(|(_, _, c)| sym_eigenvalues(c).1)
            .fold(0.0_f64, f64::max);
        let pad = k * lmax.sqrt();
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for (_, mu, _) in &self.components {
            b[0] = b[0].min(mu[0] - pad);
            b[1] = b[1].max(mu[0] + pad);
            b[2] = b[2].min(mu[1] - pad);
            b[3] = b[3].max(mu[1] + pad);
        }
        b
    }
}

impl super::PhaseDensity for QuasiDistribution {
    fn density(&self, q: f64, p: f64) -> f64 {
        self.eval_qp(q, p)
    }
}
