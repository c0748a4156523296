//! Information-flow quantifiers built on the distance measures: distance
//! time series along the bath dynamics, the backflow (non-Markovianity)
//! measure, the ordering whose Kolmogorov distance matches the trace
//! distance, and the approach to the limit of large phase-space widths.

mod backflow;
mod classical;
mod optimal;
mod series;

use serde::{Deserialize, Serialize};

use crate::fock::FockOptions;
use crate::phasespace::KolmogorovOptions;

pub use backflow::{nonmarkovianity, nonmarkovianity_partial};
pub use classical::{classical_limit_probe, ProbeRow, PROBE_ORDERINGS};
pub use optimal::{optimal_ordering, ordering_deviation, Boundary, OptimalOrdering, DEFAULT_TOL_S};
pub use series::{coherent_pair, distance_series, DistanceSeries, DEFAULT_ORDERINGS};

/// Numerical settings shared by all distance evaluations in this module.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FlowOptions {
    pub fock: FockOptions,
    pub kolmogorov: KolmogorovOptions,
}
