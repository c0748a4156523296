use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::noise::{NoiseIntegrals, NoiseModel};
use super::{CLParams, GreensFunction};
use crate::error::{Error, Result};
use crate::par;
use crate::phasespace::{sym_eigenvalues, GaussianComponent};

/// Exact Gaussian evolution for one parameter set.
///
/// Phase-space coordinates are scaled, `q = √(m₀ω₀) q₀` and
/// `p = p₀/√(m₀ω₀)`, and covariances use the convention in which the vacuum
/// has `σ = ħ·1`. The mean moves with
/// `Φ(t) = [[Ġ, ω₀G], [G̈/ω₀, Ġ]]` and `σ(t) = Φ σ(0) Φᵀ + σ_noise(t)`.
#[derive(Debug, Clone)]
pub struct Propagator {
    params: CLParams,
    greens: GreensFunction,
    noise: NoiseModel,
}

impl Propagator {
    pub fn new(params: &CLParams) -> Result<Self> {
        let greens = GreensFunction::new(params)?;
        let noise = NoiseModel::new(params, &greens)?;
        Ok(Self { params: *params, greens, noise })
    }

    pub fn params(&self) -> &CLParams {
        &self.params
    }

    pub fn greens(&self) -> &GreensFunction {
        &self.greens
    }

    /// Propagator of the mean in scaled coordinates.
    pub fn mean_propagator(&self, t: f64) -> Matrix2<f64> {
        if t == 0.0 {
            return Matrix2::identity();
        }
        let w = self.params.omega0;
        let g = &self.greens;
        let gd = g.g_dot(t);
        Matrix2::new(gd, w * g.g(t), g.g_ddot(t) / w, gd)
    }

    /// Double time integrals of the noise kernel against `G` and `Ġ`.
    pub fn noise_integrals(&self, t: f64) -> Result<NoiseIntegrals> {
        check_time(t)?;
        self.noise.integrals(&self.params, &self.greens, t)
    }

    /// Noise contribution to `σ(t)`, independent of the initial state.
    pub fn noise_covariance(&self, t: f64) -> Result<Matrix2<f64>> {
        let i = self.noise_integrals(t)?;
        Ok(self.covariance_from(&i))
    }

    pub(crate) fn covariance_from(&self, i: &NoiseIntegrals) -> Matrix2<f64> {
        let p = &self.params;
        let qq = 2.0 * p.hbar * p.omega0 / p.m0 * i.gg;
        let pp = 2.0 * p.hbar / (p.m0 * p.omega0) * i.dd;
        let qp = 2.0 * p.hbar / p.m0 * i.gd;
        Matrix2::new(qq, qp, qp, pp)
    }

    /// Covariance at `t` for an initial covariance `sigma0`.
    pub fn covariance(&self, sigma0: &Matrix2<f64>, t: f64) -> Result<Matrix2<f64>> {
        if t == 0.0 {
            return Ok(*sigma0);
        }
        let phi = self.mean_propagator(t);
        let s = phi * sigma0 * phi.transpose() + self.noise_covariance(t)?;
        let s = 0.5 * (s + s.transpose());
        let (lo, _) = sym_eigenvalues(&s);
        if !(lo > 0.0) {
            return Err(Error::Consistency(format!("evolved covariance is not positive definite at t = {t}")));
        }
        Ok(s)
    }

    /// State at time `t`; `t = 0` returns `initial` unchanged.
    pub fn evolve(&self, initial: &GaussianComponent, t: f64) -> Result<GaussianComponent> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(*initial);
        }
        let mu = self.mean_propagator(t) * initial.mu();
        GaussianComponent::new(mu, self.covariance(&initial.sigma(), t)?)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time {t} must be finite and non-negative")));
    }
    Ok(())
}

/// State at time `t` evolved from `initial`.
pub fn evolve_state(initial: &GaussianComponent, t: f64, params: &CLParams) -> Result<GaussianComponent> {
    Propagator::new(params)?.evolve(initial, t)
}

/// Gaussian states along a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<GaussianComponent>,
}

/// Checks that `t_grid` starts at 0 and is strictly increasing.
pub fn validate_time_grid(t_grid: &[f64]) -> Result<()> {
    match t_grid.first() {
        Some(&t0) if t0 == 0.0 => {}
        _ => return Err(Error::InvalidArgument("time grid must start at 0".into())),
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::InvalidArgument("time grid must be strictly increasing and finite".into()));
    }
    Ok(())
}

/// [`evolve_state`] at every node of `t_grid`; nodes are independent and
/// are evaluated in parallel when enabled.
pub fn trajectory(initial: &GaussianComponent, t_grid: &[f64], params: &CLParams) -> Result<GaussianTrajectory> {
    validate_time_grid(t_grid)?;
    let prop = Propagator::new(params)?;
    let states = par::map_slice(t_grid, |&t| prop.evolve(initial, t)).into_iter().collect::<Result<Vec<_>>>()?;
    Ok(GaussianTrajectory { times: t_grid.to_vec(), states })
}
