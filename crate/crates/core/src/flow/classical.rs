use serde::{Deserialize, Serialize};

use super::series::DEFAULT_ORDERINGS;
use super::FlowOptions;
use crate::error::{Error, Result};
use crate::fock::trace_distance_states;
use crate::par;
use crate::phasespace::{kolmogorov_distance_states, GaussianMixtureState, Ordering};

/// Orderings over which the probe takes its supremum.
pub const PROBE_ORDERINGS: [Ordering; 3] = DEFAULT_ORDERINGS;

/// One row of [`classical_limit_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub scale: f64,
    pub d_tr: f64,
    /// Kolmogorov distances for [`PROBE_ORDERINGS`].
    pub d_kol: [f64; 3],
    /// `max_s |d_kol(s) − d_tr|`.
    pub gap: f64,
}

/// Widens every covariance of both states by each factor in `scales` and
/// reports how far the Kolmogorov distances of Q, W and P stay from the
/// trace distance. The gap should close as the widths grow.
pub fn classical_limit_probe(
    a: &GaussianMixtureState,
    b: &GaussianMixtureState,
    scales: &[f64],
    opts: &FlowOptions,
) -> Result<Vec<ProbeRow>> {
    if let Some(bad) = scales.iter().find(|s| !(**s >= 1.0 && s.is_finite())) {
        return Err(Error::InvalidArgument(format!("scale factor {bad} must be finite and at least 1")));
    }
    par::map_slice(scales, |&scale| {
        let (sa, sb) = (a.scaled_covariances(scale)?, b.scaled_covariances(scale)?);
        let d_tr = trace_distance_states(&sa, &sb, &opts.fock)?.value;
        let mut d_kol = [0.0; 3];
        for (slot, s) in d_kol.iter_mut().zip(PROBE_ORDERINGS) {
            *slot = kolmogorov_distance_states(&sa, &sb, s, &opts.kolmogorov)?;
        }
        let gap = d_kol.iter().map(|d| (d - d_tr).abs()).fold(0.0, f64::max);
        Ok(ProbeRow { scale, d_tr, d_kol, gap })
    })
    .into_iter()
    .collect()
}
