use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::FlowOptions;
use crate::error::{Error, Result};
use crate::fock::trace_distance_states;
use crate::par;
use crate::phasespace::{kolmogorov_distance_states, sym_eigenvalues, GaussianComponent, GaussianMixtureState, Ordering};
use crate::qbm::{validate_time_grid, CLParams, Propagator};

/// Q, Wigner and P, in that order.
pub const DEFAULT_ORDERINGS: [Ordering; 3] = [Ordering::Q, Ordering::WIGNER, Ordering::P];

/// An s-ordered distribution counts as singular when `σ − sħ·1` has an
/// eigenvalue below this multiple of ħ. Unitary dynamics of a coherent
/// state keeps `σ = ħ·1` only up to round-off, and the distance of two
/// near-delta P functions would flip between 1 and absent.
const SINGULAR_ORDERING_TOL: f64 = 1e-9;

/// Distances between two evolving states sampled on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSeries {
    pub times: Vec<f64>,
    pub d_tr: Vec<f64>,
    pub orderings: Vec<Ordering>,
    /// `d_kol[k][i]` is the distance for `orderings[k]` at `times[i]`, absent
    /// where that distribution is singular.
    pub d_kol: Vec<Vec<Option<f64>>>,
}

impl DistanceSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn kolmogorov(&self, s: Ordering) -> Option<&[Option<f64>]> {
        self.orderings.iter().position(|o| *o == s).map(|k| self.d_kol[k].as_slice())
    }

    /// Largest amount by which `d_kol(s_min) ≤ d_tr ≤ d_kol(s_max)` fails,
    /// over nodes where both bounding orderings are present; 0 if it holds.
    pub fn sandwich_violation(&self) -> f64 {
        let lo = self.orderings.iter().enumerate().min_by(|a, b| a.1.value().total_cmp(&b.1.value()));
        let hi = self.orderings.iter().enumerate().max_by(|a, b| a.1.value().total_cmp(&b.1.value()));
        let (Some((klo, _)), Some((khi, _))) = (lo, hi) else { return 0.0 };
        (0..self.len())
            .filter_map(|i| {
                let (q, p) = (self.d_kol[klo][i]?, self.d_kol[khi][i]?);
                Some((q - self.d_tr[i]).max(self.d_tr[i] - p).max(0.0))
            })
            .fold(0.0, f64::max)
    }
}

/// Coherent states centred at `±displacement`.
pub fn coherent_pair(displacement: Vector2<f64>, hbar: f64) -> Result<(GaussianComponent, GaussianComponent)> {
    Ok((GaussianComponent::coherent(displacement, hbar)?, GaussianComponent::coherent(-displacement, hbar)?))
}

/// Evolves both states of `pair` under `params` and records the trace
/// distance and the Kolmogorov distance for every ordering at each node of
/// `t_grid`.
///
/// Nodes are independent and may run in parallel; the output is ordered by
/// node. Orderings whose distribution is singular at a node (the P function
/// of a coherent state at `t = 0`) are recorded as absent.
pub fn distance_series(
    pair: (&GaussianComponent, &GaussianComponent),
    params: &CLParams,
    t_grid: &[f64],
    orderings: &[Ordering],
    opts: &FlowOptions,
) -> Result<DistanceSeries> {
    validate_time_grid(t_grid)?;
    let prop = Propagator::new(params)?;
    let nodes = par::map_slice(t_grid, |&t| node(&prop, pair, t, orderings, opts))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut d_tr = Vec::with_capacity(nodes.len());
    let mut d_kol = vec![Vec::with_capacity(nodes.len()); orderings.len()];
    for (tr, kol) in nodes {
        d_tr.push(tr);
        for (col, v) in d_kol.iter_mut().zip(kol) {
            col.push(v);
        }
    }
    Ok(DistanceSeries { times: t_grid.to_vec(), d_tr, orderings: orderings.to_vec(), d_kol })
}

fn node(
    prop: &Propagator,
    (a, b): (&GaussianComponent, &GaussianComponent),
    t: f64,
    orderings: &[Ordering],
    opts: &FlowOptions,
) -> Result<(f64, Vec<Option<f64>>)> {
    let hbar = prop.params().hbar;
    let (ea, eb) = if t == 0.0 {
        (*a, *b)
    } else {
        let phi = prop.mean_propagator(t);
        let noise = prop.noise_covariance(t)?;
        let step = |g: &GaussianComponent| {
            let s = phi * g.sigma() * phi.transpose() + noise;
            GaussianComponent::new(phi * g.mu(), 0.5 * (s + s.transpose()))
        };
        (step(a)?, step(b)?)
    };
    let sa = GaussianMixtureState::single(ea, hbar)?;
    let sb = GaussianMixtureState::single(eb, hbar)?;
    let d_tr = trace_distance_states(&sa, &sb, &opts.fock)?.value;
    let kol = orderings
        .iter()
        .map(|&s| {
            if is_singular(&ea, s, hbar) || is_singular(&eb, s, hbar) {
                return Ok(None);
            }
            match kolmogorov_distance_states(&sa, &sb, s, &opts.kolmogorov) {
                Ok(v) => Ok(Some(v)),
                Err(Error::SingularOrdering { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((d_tr, kol))
}

fn is_singular(g: &GaussianComponent, s: Ordering, hbar: f64) -> bool {
    let (lo, _) = sym_eigenvalues(&(g.sigma() - Matrix2::identity() * (s.value() * hbar)));
    lo <= SINGULAR_ORDERING_TOL * hbar
}
