use serde::{Deserialize, Serialize};

use super::FlowOptions;
use crate::error::{Error, Result};
use crate::fock::trace_distance_states;
use crate::phasespace::{kolmogorov_distance_states, GaussianMixtureState, KolmogorovOptions, Ordering};

/// Default width of the final bracket around the optimal ordering.
pub const DEFAULT_TOL_S: f64 = 1e-3;

const AUDIT_ORDERINGS: [f64; 4] = [-1.0, -0.5, 0.0, 0.5];

/// Why the search stopped at an end of `[-1, 1]` instead of at a root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// `d_kol(−1)` already exceeds `d_tr`.
    Lower,
    /// `d_kol(+1)` is still below `d_tr`.
    Upper,
    /// `d_kol(s) − d_tr` vanishes over the whole range within tolerance
    /// (typically both distances saturate at 1); reported at `s = 1`.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalOrdering {
    pub s: Ordering,
    pub boundary: Option<Boundary>,
    pub d_tr: f64,
    /// Final bracket `[lo, hi]`; collapses to a point at a boundary.
    pub bracket: (f64, f64),
    /// `d_kol(s) − d_tr` at `s = −1, −0.5, 0, 0.5`.
    pub audit: [f64; 4],
    /// Whether the audit values are nondecreasing within `2·refine_tol`.
    pub monotone: bool,
}

/// `d_kol(s) − d_tr` for a precomputed trace distance.
pub fn ordering_deviation(
    a: &GaussianMixtureState,
    b: &GaussianMixtureState,
    s: Ordering,
    d_tr: f64,
    opts: &KolmogorovOptions,
) -> Result<f64> {
    Ok(kolmogorov_distance_states(a, b, s, opts)? - d_tr)
}

/// Ordering at which the Kolmogorov distance equals the trace distance.
///
/// `f(s) = d_kol(s) − d_tr` is nondecreasing in `s`, so the root is found by
/// bisection down to a bracket of width `tol_s`. Inside the search the
/// Kolmogorov refinement tolerance is tightened to a fifth of
/// `opts.kolmogorov.refine_tol` so the sign test stays reliable near the
/// root. Without a sign change the nearer endpoint is returned together
/// with a [`Boundary`] flag.
pub fn optimal_ordering(
    a: &GaussianMixtureState,
    b: &GaussianMixtureState,
    tol_s: f64,
    opts: &FlowOptions,
) -> Result<OptimalOrdering> {
    if !(tol_s > 0.0) {
        return Err(Error::InvalidArgument("tol_s must be positive".into()));
    }
    if a == b {
        return Err(Error::DegeneratePair);
    }
    let d_tr = trace_distance_states(a, b, &opts.fock)?.value;
    let outer = opts.kolmogorov.refine_tol;
    let inner = KolmogorovOptions { refine_tol: outer / 5.0, ..opts.kolmogorov };
    let f = |s: f64| ordering_deviation(a, b, Ordering::new(s)?, d_tr, &inner);

    let mut audit = [0.0; 4];
    for (slot, s) in audit.iter_mut().zip(AUDIT_ORDERINGS) {
        *slot = f(s)?;
    }
    let monotone = audit.windows(2).all(|w| w[1] >= w[0] - 2.0 * outer);

    let (f_lo, f_hi) = (audit[0], f(1.0)?);
    let eps = 2.0 * outer;
    let at = |s: f64, flag| OptimalOrdering {
        s: Ordering::new(s).expect("endpoint"),
        boundary: Some(flag),
        d_tr,
        bracket: (s, s),
        audit,
        monotone,
    };
    if f_hi.abs() < eps && f_lo.abs() < eps {
        return Ok(at(1.0, Boundary::Flat));
    }
    if f_hi < 0.0 {
        return Ok(at(1.0, Boundary::Upper));
    }
    if f_lo > 0.0 {
        return Ok(at(-1.0, Boundary::Lower));
    }

    let (mut lo, mut hi) = (-1.0, 1.0);
    // Start from the audit bracket instead of the full interval.
    for (s, v) in AUDIT_ORDERINGS.iter().zip(audit) {
        if v <= 0.0 {
            lo = *s;
        }
    }
    for (s, v) in AUDIT_ORDERINGS.iter().zip(audit).rev() {
        if v > 0.0 && *s > lo {
            hi = *s;
        }
    }
    while hi - lo > tol_s {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(OptimalOrdering {
        s: Ordering::new(0.5 * (lo + hi))?,
        boundary: None,
        d_tr,
        bracket: (lo, hi),
        audit,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::GaussianComponent;
    use nalgebra::{Matrix2, Vector2};

    fn state(q: f64, var: f64) -> GaussianMixtureState {
        let g = GaussianComponent::new(Vector2::new(q, 0.0), Matrix2::identity() * var).unwrap();
        GaussianMixtureState::single(g, 1.0).unwrap()
    }

    #[test]
    fn identical_states_are_rejected() {
        let a = state(0.5, 1.2);
        assert_eq!(optimal_ordering(&a, &a.clone(), 1e-3, &FlowOptions::default()), Err(Error::DegeneratePair));
    }

    #[test]
    fn saturated_pair_is_flat() {
        let r = optimal_ordering(&state(-15.0, 1.5), &state(15.0, 1.5), 1e-3, &FlowOptions::default()).unwrap();
        assert_eq!(r.boundary, Some(Boundary::Flat));
        assert_eq!(r.s, Ordering::P);
    }

    #[test]
    fn interior_root_is_bracketed() {
        let r = optimal_ordering(&state(0.75, 1.2), &state(-0.75, 1.2), 1e-3, &FlowOptions::default()).unwrap();
        assert_eq!(r.boundary, None);
        assert!(r.bracket.1 - r.bracket.0 <= 1e-3);
        assert!(r.monotone);
        assert!(r.s.value() > -1.0 && r.s.value() < 1.0);
    }
}
