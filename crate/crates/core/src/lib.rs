//! Information-flow quantifiers for continuous-variable open quantum systems.
//!
//! The crate compares two ways of measuring how distinguishable a pair of
//! states is:
//!
//! * the trace distance of Fock-truncated density matrices ([`fock`]), and
//! * Kolmogorov distances of s-ordered quasi-probability distributions on
//!   phase space ([`phasespace`]),
//!
//! and tracks both along the exact Gaussian dynamics of a damped oscillator
//! coupled to an Ohmic bath with Lorentz–Drude cutoff ([`qbm`]). The [`flow`]
//! module turns distance time series into backflow measures, locates the
//! ordering whose Kolmogorov distance equals the trace distance, and probes
//! the limit of large phase-space widths.

pub mod error;
pub mod flow;
pub mod fock;
pub mod par;
pub mod phasespace;
pub mod qbm;
pub mod quad;

pub use error::{Error, Result};
