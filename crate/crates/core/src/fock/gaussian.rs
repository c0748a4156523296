//! Number-basis matrix elements of Gaussian states in closed form.
//!
//! With `v = (α*, α)` the Husimi function of a Gaussian state satisfies
//! `e^{|α|²} ⟨α|ρ|α⟩ = exp(a v₀² + b v₁² + c v₀v₁ + d v₀ + e v₁ + f)`, and
//! `ρ_mn / √(m! n!)` is the coefficient of `v₀ᵐ v₁ⁿ`. Differentiating the
//! exponential gives a three-term recurrence for the matrix elements.

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;

use super::FockMatrix;
use crate::error::{Error, Result};
use crate::phasespace::{GaussianComponent, GaussianMixtureState};

struct Coefficients {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    e: Complex64,
    f: f64,
}

fn coefficients(g: &GaussianComponent, hbar: f64) -> Result<Coefficients> {
    let husimi = g.sigma() + Matrix2::identity() * hbar;
    let det = husimi.determinant();
    let inv = husimi.try_inverse().ok_or(Error::DegenerateCovariance { det })?;
    let s = (0.5 * hbar).sqrt();
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    // columns of L, x = L v
    let l = [Vector2::new(one * s, i * s), Vector2::new(one * s, -i * s)];
    let ac = inv.map(|x| Complex64::new(x, 0.0));
    let m = |j: usize, k: usize| (l[j].transpose() * ac * l[k])[(0, 0)];
    let mu = g.mu();
    let amu = (ac * mu.map(|x| Complex64::new(x, 0.0))).into_owned();
    let lin = |j: usize| 2.0 * (l[j].transpose() * &amu)[(0, 0)];
    Ok(Coefficients {
        a: -m(0, 0),
        b: -m(1, 1),
        c: one - 2.0 * m(0, 1),
        d: lin(0),
        e: lin(1),
        f: -(mu.transpose() * inv * mu)[(0, 0)] + (2.0 * hbar / det.sqrt()).ln(),
    })
}

/// Adds `weight · ρ(g)` to the column-major buffer `out`.
fn accumulate(out: &mut [Complex64], dim: usize, weight: f64, g: &GaussianComponent, hbar: f64) -> Result<()> {
    let k = coefficients(g, hbar)?;
    if k.f < -700.0 {
        return Err(Error::Range { m: 0, n: 0 });
    }
    let sqrt: Vec<f64> = (0..=dim).map(|x| (x as f64).sqrt()).collect();
    let at = |m: usize, n: usize| m + n * dim;
    let mut r = vec![Complex64::new(0.0, 0.0); dim * dim];
    r[0] = Complex64::new(k.f.exp(), 0.0);
    for n in 0..dim - 1 {
        let mut v = k.e * r[at(0, n)];
        if n > 0 {
            v += 2.0 * k.b * sqrt[n] * r[at(0, n - 1)];
        }
        r[at(0, n + 1)] = v / sqrt[n + 1];
    }
    for m in 0..dim - 1 {
        let inv = 1.0 / sqrt[m + 1];
        for n in 0..dim {
            let mut v = k.d * r[at(m, n)];
            if m > 0 {
                v += 2.0 * k.a * sqrt[m] * r[at(m - 1, n)];
            }
            if n > 0 {
                v += k.c * sqrt[n] * r[at(m, n - 1)];
            }
            r[at(m + 1, n)] = v * inv;
        }
    }
    if r.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Range { m: dim - 1, n: dim - 1 });
    }
    for (o, v) in out.iter_mut().zip(&r) {
        *o += v * weight;
    }
    Ok(())
}

/// Truncated density matrix of a Gaussian-mixed state, `ρ_mn` for
/// `m, n ≤ cutoff`, without renormalization.
pub fn gaussian_fock_matrix(state: &GaussianMixtureState, cutoff: usize) -> Result<FockMatrix> {
    let dim = cutoff + 1;
    let mut buf = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (w, g) in state.components() {
        accumulate(&mut buf, dim, *w, g, state.hbar())?;
    }
    FockMatrix::new(DMatrix::from_vec(dim, dim, buf))
}
