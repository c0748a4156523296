use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `(q, p)` of the scaled phase space, both coordinates in units of √ħ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Result<Self> {
        if !(q.is_finite() && p.is_finite()) {
            return Err(Error::NonFinite("phase point"));
        }
        Ok(Self { q, p })
    }

    pub const fn origin() -> Self {
        Self { q: 0.0, p: 0.0 }
    }

    pub fn to_vector(self) -> Vector2<f64> {
        Vector2::new(self.q, self.p)
    }

    pub fn from_vector(v: Vector2<f64>) -> Result<Self> {
        Self::new(v[0], v[1])
    }

    pub fn norm_squared(self) -> f64 {
        self.q * self.q + self.p * self.p
    }
}

/// The symplectic form `[[0, 1], [-1, 0]]`.
pub fn symplectic_form() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

/// Complex amplitude `α = (q + i p) / √(2ħ)` of a phase-space point.
pub fn complex_coords(x: PhasePoint, hbar: f64) -> Complex64 {
    debug_assert!(hbar > 0.0);
    Complex64::new(x.q, x.p) / (2.0 * hbar).sqrt()
}

/// Inverse of [`complex_coords`]: `x = √(2ħ) (Re α, Im α)`.
pub fn phase_point_from_complex(alpha: Complex64, hbar: f64) -> Result<PhasePoint> {
    let s = (2.0 * hbar).sqrt();
    PhasePoint::new(s * alpha.re, s * alpha.im)
}
