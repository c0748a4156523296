use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a harmonic oscillator linearly coupled to an Ohmic bath with
/// a Lorentz–Drude cutoff.
///
/// Frequencies are in units of `omega0`, temperatures as `k_B T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CLParams {
    pub omega0: f64,
    pub m0: f64,
    /// Coupling strength; the Markov limit damps the mean as `q̈ + 2γq̇ + ω₀²q = 0`.
    pub gamma: f64,
    /// Drude cutoff frequency.
    #[serde(rename = "Omega")]
    pub cutoff: f64,
    #[serde(rename = "kT")]
    pub kt: f64,
    pub hbar: f64,
}

impl Default for CLParams {
    fn default() -> Self {
        Self { omega0: 1.0, m0: 1.0, gamma: 0.1, cutoff: 100.0, kt: 2.0, hbar: 1.0 }
    }
}

impl CLParams {
    pub fn new(omega0: f64, m0: f64, gamma: f64, cutoff: f64, kt: f64, hbar: f64) -> Result<Self> {
        let p = Self { omega0, m0, gamma, cutoff, kt, hbar };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.omega0, self.m0, self.gamma, self.cutoff, self.kt, self.hbar];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("model parameters"));
        }
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidArgument(what.to_string()))
            }
        };
        check(self.omega0 > 0.0, "omega0 must be positive")?;
        check(self.m0 > 0.0, "m0 must be positive")?;
        check(self.gamma >= 0.0, "gamma must be non-negative")?;
        check(self.cutoff > 0.0, "Omega must be positive")?;
        check(self.kt >= 0.0, "kT must be non-negative")?;
        check(self.hbar > 0.0, "hbar must be positive")
    }

    /// Memory kernel `γ(t) = 2γΩ e^{−Ωt}` of the friction force.
    pub fn memory_kernel(&self, t: f64) -> f64 {
        2.0 * self.gamma * self.cutoff * (-self.cutoff * t).exp()
    }
}

/// `J(ω) = (2m₀γ/π) ω Ω²/(Ω² + ω²)`.
pub fn spectral_density(omega: f64, params: &CLParams) -> f64 {
    let o2 = params.cutoff * params.cutoff;
    2.0 * params.m0 * params.gamma / PI * omega * o2 / (o2 + omega * omega)
}

/// `ω coth(ħω / 2kT)` for `ω ≥ 0`, continuous at `ω = 0` and at `kT = 0`.
pub(crate) fn omega_coth(omega: f64, params: &CLParams) -> f64 {
    if params.kt == 0.0 {
        return omega;
    }
    let x = params.hbar * omega / (2.0 * params.kt);
    if x < 1e-6 {
        2.0 * params.kt / params.hbar * (1.0 + x * x / 3.0)
    } else if x > 40.0 {
        omega
    } else {
        omega / x.tanh()
    }
}

/// `J(ω) coth(ħω / 2kT)`, the spectrum of the symmetrized bath noise.
pub fn noise_spectrum(omega: f64, params: &CLParams) -> f64 {
    let o2 = params.cutoff * params.cutoff;
    2.0 * params.m0 * params.gamma / PI * o2 / (o2 + omega * omega) * omega_coth(omega, params)
}
