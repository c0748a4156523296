use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CLParams;
use crate::error::{Error, Result};

/// Homogeneous solution of `G̈ + ∫₀ᵗ γ(t−s) Ġ(s) ds + ω₀² G = 0` with
/// `G(0) = 0`, `Ġ(0) = 1`, in pole–residue form `G(t) = Σₖ Rₖ e^{zₖ t}`.
///
/// In the Laplace domain `Ĝ(z) = (z + Ω) / (z³ + Ωz² + (ω₀² + 2γΩ)z + ω₀²Ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreensFunction {
    poles: [Complex64; 3],
    residues: [Complex64; 3],
}

/// Minimum pole separation, relative to `max(1, |z|)`, before the residue
/// form is considered degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

fn cubic(c: &[f64; 3], z: Complex64) -> (Complex64, Complex64) {
    let v = ((z + c[0]) * z + c[1]) * z + c[2];
    let d = (3.0 * z + 2.0 * c[0]) * z + c[1];
    (v, d)
}

impl GreensFunction {
    pub fn new(params: &CLParams) -> Result<Self> {
        params.validate()?;
        let w2 = params.omega0 * params.omega0;
        let om = params.cutoff;
        // z³ + c0 z² + c1 z + c2
        let c = [om, w2 + 2.0 * params.gamma * om, w2 * om];
        let companion = Matrix3::new(-c[0], -c[1], -c[2], 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        let eig = companion.complex_eigenvalues();
        let mut poles = [eig[0], eig[1], eig[2]];
        for z in poles.iter_mut() {
            for _ in 0..4 {
                let (v, d) = cubic(&c, *z);
                if d.norm() == 0.0 {
                    break;
                }
                *z -= v / d;
            }
        }
        // A real cubic has one real root and either two more real roots or
        // a conjugate pair; restore that structure exactly.
        poles.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()).then(a.re.total_cmp(&b.re)));
        let scale = poles.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if poles[2].im.abs() <= 1e-12 * scale {
            for z in poles.iter_mut() {
                z.im = 0.0;
            }
        } else {
            poles[0].im = 0.0;
            let re = 0.5 * (poles[1].re + poles[2].re);
            let im = 0.5 * (poles[1].im.abs() + poles[2].im.abs());
            poles[1] = Complex64::new(re, im);
            poles[2] = Complex64::new(re, -im);
        }
        let mut separation = f64::INFINITY;
        for i in 0..3 {
            for j in i + 1..3 {
                let rel = (poles[i] - poles[j]).norm() / poles[i].norm().max(1.0);
                separation = separation.min(rel);
            }
        }
        if separation < DEGENERACY_TOL {
            return Err(Error::DegenerateRoots { separation });
        }
        let mut residues = [Complex64::new(0.0, 0.0); 3];
        for k in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if j != k {
                    den *= poles[k] - poles[j];
                }
            }
            residues[k] = (poles[k] + om) / den;
        }
        Ok(Self { poles, residues })
    }

    pub fn poles(&self) -> &[Complex64; 3] {
        &self.poles
    }

    pub fn residues(&self) -> &[Complex64; 3] {
        &self.residues
    }

    /// `Σₖ Rₖ zₖʲ e^{zₖ t}`, the `j`-th derivative of `G` at `t`.
    pub fn derivative(&self, j: u32, t: f64) -> f64 {
        self.poles
            .iter()
            .zip(&self.residues)
            .map(|(z, r)| r * z.powu(j) * (z * t).exp())
            .sum::<Complex64>()
            .re
    }

    pub fn g(&self, t: f64) -> f64 {
        self.derivative(0, t)
    }

    pub fn g_dot(&self, t: f64) -> f64 {
        self.derivative(1, t)
    }

    pub fn g_ddot(&self, t: f64) -> f64 {
        self.derivative(2, t)
    }

    /// Largest imaginary part of `G(t)` before the real part is taken.
    pub fn imaginary_residual(&self, t: f64) -> f64 {
        self.poles.iter().zip(&self.residues).map(|(z, r)| r * (z * t).exp()).sum::<Complex64>().im.abs()
    }
}

/// Convenience wrapper for [`GreensFunction::new`].
pub fn greens_function(params: &CLParams) -> Result<GreensFunction> {
    GreensFunction::new(params)
}

/// Default step of [`greens_function_volterra_oracle`].
pub fn default_oracle_step(params: &CLParams) -> f64 {
    0.002 / params.omega0.max(params.cutoff)
}

/// `G` sampled at `t_grid` by direct time stepping of the integro-differential
/// equation.
///
/// The exponential memory kernel lets the friction integral
/// `M(t) = ∫₀ᵗ γ(t−s) Ġ(s) ds` be carried as a state variable with
/// `Ṁ = 2γΩ Ġ − ΩM`; the system `(G, Ġ, M)` is integrated with classical
/// fourth-order Runge–Kutta at a step no larger than `step`. Each grid
/// interval is split into equal steps so grid points are hit exactly.
pub fn greens_function_volterra_oracle(params: &CLParams, t_grid: &[f64], step: f64) -> Result<Vec<f64>> {
    params.validate()?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let w2 = params.omega0 * params.omega0;
    let a = 2.0 * params.gamma * params.cutoff;
    let om = params.cutoff;
    let rhs = |y: [f64; 3]| [y[1], -y[2] - w2 * y[0], a * y[1] - om * y[2]];
    let mut y = [0.0, 1.0, 0.0];
    let mut t = 0.0;
    let mut out = Vec::with_capacity(t_grid.len());
    for &target in t_grid {
        if !(target >= t) {
            return Err(Error::InvalidArgument("time grid must be non-decreasing from 0".into()));
        }
        let n = ((target - t) / step).ceil() as usize;
        let h = if n > 0 { (target - t) / n as f64 } else { 0.0 };
        for _ in 0..n {
            let k1 = rhs(y);
            let k2 = rhs(std::array::from_fn(|i| y[i] + 0.5 * h * k1[i]));
            let k3 = rhs(std::array::from_fn(|i| y[i] + 0.5 * h * k2[i]));
            let k4 = rhs(std::array::from_fn(|i| y[i] + h * k3[i]));
            for i in 0..3 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if !(y[0].abs() <= 1e6) {
                return Err(Error::Unstable { t, value: y[0] });
            }
        }
        t = target;
        out.push(y[0]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(gamma: f64, cutoff: f64) -> CLParams {
        CLParams::new(1.0, 1.0, gamma, cutoff, 1.0, 1.0).unwrap()
    }

    #[test]
    fn initial_conditions() {
        for (g, o) in [(0.1, 100.0), (1.0, 100.0), (0.1, 1.0), (1.0, 1.0), (0.0, 3.0)] {
            let gf = GreensFunction::new(&params(g, o)).unwrap();
            assert!(gf.g(0.0).abs() < 1e-12);
            assert!((gf.g_dot(0.0) - 1.0).abs() < 1e-12);
            for t in [0.3, 2.0, 17.0] {
                assert!(gf.imaginary_residual(t) < 1e-12);
            }
        }
    }

    #[test]
    fn undamped_limit() {
        let gf = GreensFunction::new(&params(0.0, 7.0)).unwrap();
        for t in [0.0, 0.5, 3.0, 40.0] {
            assert!((gf.g(t) - t.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_undamped() {
        let p = params(0.0, 1.0);
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let g = greens_function_volterra_oracle(&p, &grid, default_oracle_step(&p)).unwrap();
        for (t, v) in grid.iter().zip(g) {
            assert!((v - t.sin()).abs() < 1e-6);
        }
    }
}
