use serde::{Deserialize, Serialize};

use super::{Ordering, PhaseDensity, QuasiDistribution};
use crate::error::{Error, Result};
use crate::par;

/// Rectangular node grid on phase space (trapezoidal quadrature nodes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_q: usize,
    pub n_p: usize,
}

/// Padding of the quadrature box in units of the widest standard width.
pub const DEFAULT_EXTENT_K: f64 = 6.0;
/// Initial node count per axis (128 intervals).
pub const DEFAULT_NODES: usize = 129;

impl PhaseGrid {
    pub fn new(q_min: f64, q_max: f64, p_min: f64, p_max: f64, n_q: usize, n_p: usize) -> Result<Self> {
        let finite = [q_min, q_max, p_min, p_max].iter().all(|v| v.is_finite());
        if !finite || !(q_max > q_min) || !(p_max > p_min) || n_q < 2 || n_p < 2 {
            return Err(Error::InvalidArgument(format!(
                "invalid phase grid [{q_min}, {q_max}] x [{p_min}, {p_max}] with {n_q} x {n_p} nodes"
            )));
        }
        Ok(Self { q_min, q_max, p_min, p_max, n_q, n_p })
    }

    /// Square-node grid covering every Gaussian term of `dists`, padded by
    /// `k·√λ_max` around the bounding box of the means.
    pub fn covering(dists: &[&QuasiDistribution], k: f64, nodes: usize) -> Result<Self> {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for d in dists {
            let e = d.extent(k);
            b[0] = b[0].min(e[0]);
            b[1] = b[1].max(e[1]);
            b[2] = b[2].min(e[2]);
            b[3] = b[3].max(e[3]);
        }
        Self::new(b[0], b[1], b[2], b[3], nodes, nodes)
    }

    pub fn step_q(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_q - 1) as f64
    }

    pub fn step_p(&self) -> f64 {
        (self.p_max - self.p_min) / (self.n_p - 1) as f64
    }

    pub fn q(&self, i: usize) -> f64 {
        if i + 1 == self.n_q {
            self.q_max
        } else {
            self.q_min + i as f64 * self.step_q()
        }
    }

    pub fn p(&self, j: usize) -> f64 {
        if j + 1 == self.n_p {
            self.p_max
        } else {
            self.p_min + j as f64 * self.step_p()
        }
    }

    /// Same box with every interval halved (nested nodes).
    pub fn refined(&self) -> Self {
        Self { n_q: 2 * self.n_q - 1, n_p: 2 * self.n_p - 1, ..*self }
    }

    /// Trapezoidal weight of node `(i, j)` without the cell area.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let wq = if i == 0 || i + 1 == self.n_q { 0.5 } else { 1.0 };
        let wp = if j == 0 || j + 1 == self.n_p { 0.5 } else { 1.0 };
        wq * wp
    }

    /// Trapezoidal rule for `∫ f dq dp` over the box.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(f64, f64) -> f64 + Sync + Send,
    {
        let rows = par::ordered_sum(self.n_p, |j| {
            let p = self.p(j);
            (0..self.n_q).map(|i| self.weight(i, j) * f(self.q(i), p)).sum::<f64>()
        });
        rows * self.step_q() * self.step_p()
    }
}

/// A distribution tabulated on a [`PhaseGrid`], evaluated off-grid by
/// bilinear interpolation and zero outside the box.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDistribution {
    grid: PhaseGrid,
    /// Row-major in `p`: `values[j * n_q + i]`.
    values: Vec<f64>,
    order: Ordering,
    hbar: f64,
}

impl SampledDistribution {
    pub fn new(grid: PhaseGrid, values: Vec<f64>, order: Ordering, hbar: f64) -> Result<Self> {
        if values.len() != grid.n_q * grid.n_p {
            return Err(Error::DimensionMismatch(values.len(), grid.n_q * grid.n_p));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sampled distribution"));
        }
        Ok(Self { grid, values, order, hbar })
    }

    pub fn sample<D: PhaseDensity + ?Sized>(density: &D, grid: PhaseGrid, order: Ordering, hbar: f64) -> Self {
        let rows = par::map_range(grid.n_p, |j| {
            let p = grid.p(j);
            (0..grid.n_q).map(|i| density.density(grid.q(i), p)).collect::<Vec<_>>()
        });
        Self { grid, values: rows.concat(), order, hbar }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn order(&self) -> Ordering {
        self.order
    }

    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.n_q + i]
    }

    /// Discrete convolution with `N_{0,(s−r)ħ1}`, done separably along each
    /// axis with trapezoidal weights; mass outside the box is dropped.
    pub fn reorder(&self, target: Ordering) -> Result<Self> {
        let s = self.order.value();
        let r = target.value();
        if !(r < s) {
            return Err(Error::OrderingDirection { from: s, to: r });
        }
        let c = (s - r) * self.hbar;
        let g = self.grid;
        let kernel = |u: f64| (-u * u / c).exp() / (std::f64::consts::PI * c).sqrt();
        let (hq, hp) = (g.step_q(), g.step_p());
        let kq: Vec<f64> = (0..g.n_q).map(|d| kernel(d as f64 * hq) * hq).collect();
        let kp: Vec<f64> = (0..g.n_p).map(|d| kernel(d as f64 * hp) * hp).collect();
        let edge = |k: usize, n: usize| if k == 0 || k + 1 == n { 0.5 } else { 1.0 };

        // along q
        let rows = par::map_range(g.n_p, |j| {
            let row = &self.values[j * g.n_q..(j + 1) * g.n_q];
            (0..g.n_q)
                .map(|i| {
                    (0..g.n_q)
                        .map(|k| edge(k, g.n_q) * row[k] * kq[i.abs_diff(k)])
                        .sum::<f64>()
                })
                .collect::<Vec<_>>()
        });
        let tmp = rows.concat();
        // along p
        let cols = par::map_range(g.n_q, |i| {
            (0..g.n_p)
                .map(|j| {
                    (0..g.n_p)
                        .map(|k| edge(k, g.n_p) * tmp[k * g.n_q + i] * kp[j.abs_diff(k)])
                        .sum::<f64>()
                })
                .collect::<Vec<_>>()
        });
        let mut values = vec![0.0; g.n_q * g.n_p];
        for (i, col) in cols.into_iter().enumerate() {
            for (j, v) in col.into_iter().enumerate() {
                values[j * g.n_q + i] = v;
            }
        }
        Ok(Self { grid: g, values, order: target, hbar: self.hbar })
    }
}

impl PhaseDensity for SampledDistribution {
    fn density(&self, q: f64, p: f64) -> f64 {
        let g = &self.grid;
        if q < g.q_min || q > g.q_max || p < g.p_min || p > g.p_max {
            return 0.0;
        }
        let u = (q - g.q_min) / g.step_q();
        let v = (p - g.p_min) / g.step_p();
        let i = (u.floor() as usize).min(g.n_q - 2);
        let j = (v.floor() as usize).min(g.n_p - 2);
        let (fu, fv) = (u - i as f64, v - j as f64);
        let f00 = self.value_at(i, j);
        let f10 = self.value_at(i + 1, j);
        let f01 = self.value_at(i, j + 1);
        let f11 = self.value_at(i + 1, j + 1);
        (1.0 - fv) * ((1.0 - fu) * f00 + fu * f10) + fv * ((1.0 - fu) * f01 + fu * f11)
    }
}
