//! The bath noise kernel and the noise integrals entering the covariance.
//!
//! For `kT > 0` the kernel `ν(τ) = ∫₀^∞ J(ω) coth(ħω/2kT) cos(ωτ) dω` has the
//! exact expansion
//!
//! `ν(τ) = m₀γΩ² cot(ħΩ/2kT) e^{−Ω|τ|} + (4m₀γΩ²kT/ħ) Σₙ νₙ e^{−νₙ|τ|}/(νₙ² − Ω²)`
//!
//! with Matsubara frequencies `νₙ = 2πnkT/ħ`. Each exponential term turns
//! the double time integrals of the covariance into closed forms; the slowly
//! converging Matsubara tail is summed through its large-`ν` expansion. At
//! `kT = 0` (and as an independent check) the integrals are evaluated in the
//! frequency domain by adaptive quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::params::noise_spectrum;
use super::{CLParams, GreensFunction};
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};

/// `I_ab(t) = ∫₀ᵗ∫₀ᵗ a(u) b(u') ν(u − u') du du'` for `a, b ∈ {G, Ġ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseIntegrals {
    pub gg: f64,
    pub dd: f64,
    pub gd: f64,
}

impl NoiseIntegrals {
    pub const ZERO: Self = Self { gg: 0.0, dd: 0.0, gd: 0.0 };
}

/// `ν(τ)` by adaptive quadrature of the frequency integral truncated at
/// `omega_cut`. The kernel is logarithmically divergent at `τ = 0` without a
/// cutoff, so a finite `omega_cut` is required.
pub fn noise_kernel(tau: f64, params: &CLParams, omega_cut: f64) -> Result<f64> {
    params.validate()?;
    if !(omega_cut > 0.0 && omega_cut.is_finite()) || !tau.is_finite() {
        return Err(Error::InvalidArgument("noise kernel needs finite τ and a positive cutoff".into()));
    }
    let tau = tau.abs();
    let mut points = vec![0.0];
    if params.cutoff < omega_cut {
        points.push(params.cutoff);
    }
    if tau > 0.0 {
        let period = 2.0 * PI / tau;
        let n = ((omega_cut / period).floor() as usize).min(20_000);
        points.extend((1..=n).map(|k| k as f64 * period).filter(|w| *w < omega_cut));
    }
    points.push(omega_cut);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 200_000 };
    let r = integrate(|w| [noise_spectrum(w, params) * (w * tau).cos()], &points, &opts)?;
    Ok(r.value[0])
}

/// `ν(τ)` for `τ ≠ 0` from the Matsubara expansion (no frequency cutoff).
pub fn noise_kernel_series(tau: f64, params: &CLParams) -> Result<f64> {
    params.validate()?;
    let tau = tau.abs();
    if !(tau > 0.0) || params.kt == 0.0 {
        return Err(Error::InvalidArgument("the series form needs τ ≠ 0 and kT > 0".into()));
    }
    let terms = Terms::new(params)?;
    let mut sum = terms.c0 * (-params.cutoff * tau).exp();
    let mut n = 1;
    loop {
        let nu = terms.spacing * n as f64;
        let v = terms.c(nu) * (-nu * tau).exp();
        sum += v;
        if (-nu * tau) < -40.0 && v.abs() <= 1e-17 * sum.abs() {
            break;
        }
        n += 1;
        if n > 10_000_000 {
            return Err(Error::IntegrationFailure { estimate: sum, error: v.abs() });
        }
    }
    Ok(sum)
}

/// Coefficients of the exponential expansion of `ν`.
#[derive(Debug, Clone, Copy)]
struct Terms {
    /// Weight of `e^{−Ω|τ|}`.
    c0: f64,
    /// `4m₀γΩ²kT/ħ`.
    big_c: f64,
    /// Matsubara spacing `2πkT/ħ`.
    spacing: f64,
    cutoff: f64,
}

impl Terms {
    fn new(params: &CLParams) -> Result<Self> {
        let om = params.cutoff;
        let beta = params.hbar / (2.0 * params.kt);
        let x = om / (2.0 * PI * params.kt / params.hbar);
        if x >= 0.5 && (x - x.round()).abs() < RESONANCE_TOL * x {
            return Err(Error::InvalidArgument(format!(
                "cutoff coincides with Matsubara frequency {} (Ω/ν₁ = {x})",
                x.round()
            )));
        }
        let pref = params.m0 * params.gamma * om * om;
        Ok(Self {
            c0: pref / (beta * om).tan(),
            big_c: 4.0 * pref * params.kt / params.hbar,
            spacing: 2.0 * PI * params.kt / params.hbar,
            cutoff: om,
        })
    }

    fn c(&self, nu: f64) -> f64 {
        self.big_c * nu / ((nu - self.cutoff) * (nu + self.cutoff))
    }
}

/// Relative distance of `Ω` from a Matsubara frequency below which the
/// two (individually divergent) coefficients are not used directly.
const RESONANCE_TOL: f64 = 1e-7;
/// Relative temperature offset used to step around a resonance.
const RESONANCE_SHIFT: f64 = 1e-4;

/// `(e^w − 1)/w`.
fn phi1(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..20 {
            term *= w / (k as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        (w.exp() - 1.0) / w
    }
}

/// `∫₀¹ s e^{ws} ds`.
fn phi2s(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        let mut fact = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.5, 0.0);
        for k in 1..20 {
            fact *= w / k as f64;
            sum += fact / (k as f64 + 2.0);
        }
        sum
    } else {
        (w.exp() * (w - 1.0) + 1.0) / (w * w)
    }
}

/// `E(x) = ∫₀ᵗ e^{xu} du`.
fn e_int(x: Complex64, t: f64) -> Complex64 {
    t * phi1(x * t)
}

/// Divided difference `(E(x) − E(y))/(x − y)`, stable as `y → x`.
fn e_diff(x: Complex64, y: Complex64, t: f64) -> Complex64 {
    let d = x - y;
    if d.norm() * t < 1e-5 {
        let m = 0.5 * (x + y);
        t * t * phi2s(m * t)
    } else {
        (e_int(x, t) - e_int(y, t)) / d
    }
}

/// `∫₀ᵗ∫₀ᵗ e^{pu} e^{qu'} e^{−λ|u−u'|} du du'`.
fn double_exp(lambda: f64, p: Complex64, q: Complex64, t: f64) -> Complex64 {
    let x = p + q;
    e_diff(x, p - lambda, t) + e_diff(x, q - lambda, t)
}

/// `Σ_{n>N} n^{−s}` by Euler–Maclaurin; relative error below 1e-11 for
/// `N ≥ 40` and `s ≤ 7`.
fn zeta_tail(s: i32, n: usize) -> f64 {
    let n = n as f64;
    let sf = s as f64;
    n.powi(1 - s) / (sf - 1.0) - 0.5 * n.powi(-s) + sf * n.powi(-s - 1) / 12.0
        - sf * (sf + 1.0) * (sf + 2.0) * n.powi(-s - 3) / 720.0
        + sf * (sf + 1.0) * (sf + 2.0) * (sf + 3.0) * (sf + 4.0) * n.powi(-s - 5) / 30240.0
}

/// Order of the large-`ν` expansion used for the Matsubara tail.
const TAIL_ORDER: usize = 10;

fn series_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); TAIL_ORDER + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= TAIL_ORDER {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Coefficients of `1/(λ − r)` in powers of `1/λ`.
fn pole_series(r: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); TAIL_ORDER + 1];
    let mut pw = Complex64::new(1.0, 0.0);
    for c in out.iter_mut().skip(1) {
        *c = pw;
        pw *= r;
    }
    out
}

/// Closed-form noise integrals for `kT > 0`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MatsubaraNoise {
    terms: Terms,
    /// Largest of `|zₖ|` and `Ω`; the tail expansion needs `νₙ ≫` this.
    scale: f64,
}

/// Upper bound on explicitly summed Matsubara terms before falling back to
/// frequency quadrature (reached only for very small `kT`).
pub(crate) const MAX_MATSUBARA_TERMS: usize = 2_000_000;

impl MatsubaraNoise {
    fn new(params: &CLParams, greens: &GreensFunction) -> Result<Self> {
        let terms = Terms::new(params)?;
        let scale = greens.poles().iter().map(|z| z.norm()).fold(params.cutoff, f64::max);
        Ok(Self { terms, scale })
    }

    fn terms_needed(&self, t: f64) -> usize {
        let nu = self.terms.spacing;
        let a = (8.0 * self.scale / nu).ceil();
        let b = (45.0 / (nu * t)).ceil();
        a.max(b).max(64.0).min(1e12) as usize
    }

    /// `Σ_j c_j D(λ_j; p, q, t)` including the Matsubara tail.
    fn pair_sum(&self, p: Complex64, q: Complex64, t: f64, n_terms: usize) -> Complex64 {
        let tm = &self.terms;
        let mut sum = tm.c0 * double_exp(tm.cutoff, p, q, t);
        for n in 1..=n_terms {
            let nu = tm.spacing * n as f64;
            sum += tm.c(nu) * double_exp(nu, p, q, t);
        }
        // Tail n > N: c(λ)·D(λ) without the e^{−λt} pieces, expanded in 1/λ.
        let es = e_int(p + q, t);
        let neg = |z: Complex64| pole_series(-z);
        let fp: Vec<Complex64> = neg(q)
            .iter()
            .zip(series_mul(&pole_series(p), &neg(q)))
            .map(|(a, b)| es * a - b)
            .collect();
        let fq: Vec<Complex64> = neg(p)
            .iter()
            .zip(series_mul(&pole_series(q), &neg(p)))
            .map(|(a, b)| es * a - b)
            .collect();
        let f: Vec<Complex64> = fp.iter().zip(&fq).map(|(a, b)| a + b).collect();
        let mut c = vec![Complex64::new(0.0, 0.0); TAIL_ORDER + 1];
        let o2 = tm.cutoff * tm.cutoff;
        let mut pw = tm.big_c;
        for j in (1..=TAIL_ORDER).step_by(2) {
            c[j] = Complex64::new(pw, 0.0);
            pw *= o2;
        }
        let h = series_mul(&c, &f);
        for (s, coef) in h.iter().enumerate().skip(2) {
            sum += coef * (tm.spacing.powi(-(s as i32)) * zeta_tail(s as i32, n_terms));
        }
        sum
    }

    fn integrals(&self, greens: &GreensFunction, t: f64) -> Option<NoiseIntegrals> {
        let n_terms = self.terms_needed(t);
        if n_terms > MAX_MATSUBARA_TERMS {
            return None;
        }
        let z = greens.poles();
        let r = greens.residues();
        let mut s = [[Complex64::new(0.0, 0.0); 3]; 3];
        for k in 0..3 {
            for l in k..3 {
                s[k][l] = self.pair_sum(z[k], z[l], t, n_terms);
                s[l][k] = s[k][l];
            }
        }
        let (mut gg, mut dd, mut gd) = (Complex64::default(), Complex64::default(), Complex64::default());
        for k in 0..3 {
            for l in 0..3 {
                let w = r[k] * r[l] * s[k][l];
                gg += w;
                dd += w * z[k] * z[l];
                gd += w * z[l];
            }
        }
        Some(NoiseIntegrals { gg: gg.re, dd: dd.re, gd: gd.re })
    }
}

/// How the noise integrals are obtained for a given parameter set.
#[derive(Debug, Clone, Copy)]
pub(crate) enum NoiseModel {
    Silent,
    Series(MatsubaraNoise),
    /// `Ω` sits on a Matsubara frequency: average the results at
    /// `kT(1 ± δ)`, which is second-order accurate in `δ`.
    Straddle(MatsubaraNoise, MatsubaraNoise),
    Quadrature,
}

impl NoiseModel {
    pub(crate) fn new(params: &CLParams, greens: &GreensFunction) -> Result<Self> {
        if params.gamma == 0.0 {
            return Ok(Self::Silent);
        }
        if params.kt == 0.0 {
            return Ok(Self::Quadrature);
        }
        match MatsubaraNoise::new(params, greens) {
            Ok(m) => Ok(Self::Series(m)),
            Err(Error::InvalidArgument(_)) => {
                let lo = CLParams { kt: params.kt * (1.0 - RESONANCE_SHIFT), ..*params };
                let hi = CLParams { kt: params.kt * (1.0 + RESONANCE_SHIFT), ..*params };
                Ok(Self::Straddle(MatsubaraNoise::new(&lo, greens)?, MatsubaraNoise::new(&hi, greens)?))
            }
            Err(e) => Err(e),
        }
    }

    pub(crate) fn integrals(&self, params: &CLParams, greens: &GreensFunction, t: f64) -> Result<NoiseIntegrals> {
        if t == 0.0 {
            return Ok(NoiseIntegrals::ZERO);
        }
        let series = match self {
            Self::Silent => return Ok(NoiseIntegrals::ZERO),
            Self::Quadrature => None,
            Self::Series(m) => m.integrals(greens, t),
            Self::Straddle(a, b) => match (a.integrals(greens, t), b.integrals(greens, t)) {
                (Some(x), Some(y)) => Some(NoiseIntegrals {
                    gg: 0.5 * (x.gg + y.gg),
                    dd: 0.5 * (x.dd + y.dd),
                    gd: 0.5 * (x.gd + y.gd),
                }),
                _ => None,
            },
        };
        match series {
            Some(v) => Ok(v),
            None => noise_integrals_quadrature(params, greens, t, None),
        }
    }
}

/// Noise integrals from their frequency representation
/// `I_ab(t) = ∫₀^{ω_c} dω J(ω) coth(ħω/2kT) Re[A_a(ω,t) A_b(ω,t)*]` with
/// `A_a(ω,t) = ∫₀ᵗ a(u) e^{iωu} du`, by adaptive quadrature. `omega_cut =
/// None` integrates to infinity.
pub fn noise_integrals_quadrature(
    params: &CLParams,
    greens: &GreensFunction,
    t: f64,
    omega_cut: Option<f64>,
) -> Result<NoiseIntegrals> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time {t} must be finite and non-negative")));
    }
    if t == 0.0 || params.gamma == 0.0 {
        return Ok(NoiseIntegrals::ZERO);
    }
    let z = *greens.poles();
    let r = *greens.residues();
    let f = |w: f64| -> [f64; 3] {
        let mut ag = Complex64::default();
        let mut ad = Complex64::default();
        for k in 0..3 {
            let e = e_int(z[k] + Complex64::new(0.0, w), t);
            ag += r[k] * e;
            ad += r[k] * z[k] * e;
        }
        let kw = noise_spectrum(w, params);
        [kw * ag.norm_sqr(), kw * ad.norm_sqr(), kw * (ag * ad.conj()).re]
    };
    // Breakpoints resolve the resonances and the e^{iωt} oscillation.
    let mut points = vec![0.0];
    points.extend(z.iter().map(|p| p.im.abs()).filter(|w| *w > 0.0));
    points.push(params.cutoff);
    if params.kt > 0.0 {
        points.push(params.kt / params.hbar);
    }
    let top = z.iter().map(|p| p.norm()).fold(params.cutoff.max(params.kt / params.hbar), f64::max) * 50.0;
    let end = omega_cut.unwrap_or(top);
    let period = 2.0 * PI / t;
    let n = ((end / period) as usize).min(100_000);
    points.extend((1..=n).map(|k| k as f64 * period));
    points.retain(|w| *w <= end);
    points.push(end);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-11, max_intervals: 400_000 };
    let v = match omega_cut {
        Some(_) => integrate(f, &points, &opts)?,
        None => integrate_to_infinity(f, &points, &opts)?,
    }
    .value;
    Ok(NoiseIntegrals { gg: v[0], dd: v[1], gd: v[2] })
}
