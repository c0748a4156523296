//! Run configuration, read from TOML.
//!
//! Every section and key is optional; missing values fall back to the
//! defaults below. Unknown keys are rejected so that typos surface as
//! configuration errors instead of silently running the defaults.

use std::path::Path;

use nalgebra::{Matrix2, Vector2};
use phaseflow::phasespace::{GaussianComponent, GaussianMixtureState, Ordering};
use phaseflow::qbm::CLParams;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub pair: PairConfig,
    pub time: TimeConfig,
    pub distances: DistancesConfig,
    pub tolerances: Tolerances,
    pub sweep: SweepConfig,
    pub sstar: SstarConfig,
}

/// Bath model. `gamma`, `Omega` and `kT` take a single value or a list;
/// `distances` and `covariance` run every combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub omega0: f64,
    pub m0: f64,
    pub hbar: f64,
    #[serde(deserialize_with = "one_or_many")]
    pub gamma: Vec<f64>,
    #[serde(rename = "Omega", deserialize_with = "one_or_many")]
    pub cutoff: Vec<f64>,
    #[serde(rename = "kT", deserialize_with = "one_or_many")]
    pub kt: Vec<f64>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { omega0: 1.0, m0: 1.0, hbar: 1.0, gamma: vec![1.0], cutoff: vec![100.0], kt: vec![0.5, 2.0, 20.0] }
    }
}

/// Initial states `|±x⟩` in physical (unscaled) coordinates. Without `q`
/// the displacement is `4√ħ/√(2m₀ω₀)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PairConfig {
    pub q: Option<f64>,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub t_max: f64,
    pub n_steps: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { t_max: 50.0, n_steps: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistancesConfig {
    pub orderings: Vec<f64>,
}

impl Default for DistancesConfig {
    fn default() -> Self {
        Self { orderings: vec![1.0, 0.0, -1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub refine_tol: f64,
    pub defect_tol: f64,
    pub tol_s: f64,
    pub max_cutoff: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { refine_tol: 1e-4, defect_tol: 1e-6, tol_s: 1e-3, max_cutoff: 1024 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisName {
    #[serde(rename = "kT")]
    Temperature,
    #[serde(rename = "gamma")]
    Coupling,
    #[serde(rename = "Omega")]
    Cutoff,
}

impl AxisName {
    pub fn label(self) -> &'static str {
        match self {
            AxisName::Temperature => "kT",
            AxisName::Coupling => "gamma",
            AxisName::Cutoff => "Omega",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub n: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.min];
        }
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|k| match (k, self.scale) {
                (0, _) => self.min,
                (k, _) if k == self.n - 1 => self.max,
                (k, Scale::Linear) => self.min + (self.max - self.min) * k as f64 / last,
                (k, Scale::Log) => (self.min.ln() + (self.max / self.min).ln() * k as f64 / last).exp(),
            })
            .collect()
    }
}

/// Two-parameter backflow sweep; the remaining model parameter must have a
/// single value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub axis1: Axis,
    pub axis2: Axis,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axis1: Axis { name: AxisName::Temperature, min: 0.5, max: 20.0, n: 8, scale: Scale::Log },
            axis2: Axis { name: AxisName::Coupling, min: 0.1, max: 1.0, n: 8, scale: Scale::Linear },
        }
    }
}

/// Static state pair for the optimal-ordering scan: Gaussians at `±mu` with
/// covariance `sigma·ħ`, in scaled phase-space coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SstarConfig {
    pub mu: [f64; 2],
    pub sigma: [[f64; 2]; 2],
    pub samples: usize,
}

impl Default for SstarConfig {
    fn default() -> Self {
        Self { mu: [0.75, 0.0], sigma: [[1.2, 0.0], [0.0, 1.2]], samples: 201 }
    }
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::from_toml(&text)
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable in TOML")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let m = &self.model;
        for (name, list) in [("gamma", &m.gamma), ("Omega", &m.cutoff), ("kT", &m.kt)] {
            if list.is_empty() {
                return bad(format!("model.{name} must not be empty"));
            }
        }
        for p in self.combinations() {
            p.map_err(|e| CliError::Config(e.to_string()))?;
        }
        if let Some(q) = self.pair.q {
            if !q.is_finite() {
                return bad("pair.q must be finite".into());
            }
        }
        if !self.pair.p.is_finite() {
            return bad("pair.p must be finite".into());
        }
        if !(self.time.t_max > 0.0 && self.time.t_max.is_finite()) {
            return bad("time.t_max must be positive and finite".into());
        }
        if self.distances.orderings.is_empty() {
            return bad("distances.orderings must not be empty".into());
        }
        for (i, s) in self.distances.orderings.iter().enumerate() {
            Ordering::new(*s).map_err(|e| CliError::Config(format!("distances.orderings: {e}")))?;
            if self.distances.orderings[..i].contains(s) {
                return bad(format!("distances.orderings lists {s} twice"));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [("refine_tol", t.refine_tol), ("defect_tol", t.defect_tol), ("tol_s", t.tol_s)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerances.{name} must be positive"));
            }
        }
        if t.max_cutoff < 2 {
            return bad("tolerances.max_cutoff must be at least 2".into());
        }
        for (label, axis) in [("axis1", &self.sweep.axis1), ("axis2", &self.sweep.axis2)] {
            if axis.n == 0 {
                return bad(format!("sweep.{label}.n must be at least 1"));
            }
            if !(axis.min.is_finite() && axis.max.is_finite() && axis.min <= axis.max) {
                return bad(format!("sweep.{label} needs finite min <= max"));
            }
            if axis.scale == Scale::Log && !(axis.min > 0.0) {
                return bad(format!("sweep.{label} is logarithmic and needs min > 0"));
            }
        }
        if self.sweep.axis1.name == self.sweep.axis2.name {
            return bad("sweep axes must name different parameters".into());
        }
        if self.sstar.samples < 2 {
            return bad("sstar.samples must be at least 2".into());
        }
        self.sstar_pair().map_err(|e| CliError::Config(format!("sstar: {e}")))?;
        Ok(())
    }

    /// Every `(kT, γ, Ω)` combination, in the order kT, then γ, then Ω.
    pub fn combinations(&self) -> impl Iterator<Item = phaseflow::Result<CLParams>> + '_ {
        let m = &self.model;
        m.kt.iter().flat_map(move |&kt| {
            m.gamma.iter().flat_map(move |&gamma| {
                m.cutoff.iter().map(move |&cutoff| CLParams::new(m.omega0, m.m0, gamma, cutoff, kt, m.hbar))
            })
        })
    }

    /// Parameters of one sweep cell.
    pub fn sweep_params(&self, v1: f64, v2: f64) -> Result<CLParams, CliError> {
        let m = &self.model;
        let (mut kt, mut gamma, mut cutoff) = (None, None, None);
        for (axis, v) in [(&self.sweep.axis1, v1), (&self.sweep.axis2, v2)] {
            match axis.name {
                AxisName::Temperature => kt = Some(v),
                AxisName::Coupling => gamma = Some(v),
                AxisName::Cutoff => cutoff = Some(v),
            }
        }
        let fixed = |given: Option<f64>, list: &[f64], name: &str| match (given, list) {
            (Some(v), _) => Ok(v),
            (None, [v]) => Ok(*v),
            _ => Err(CliError::Config(format!("model.{name} must be a single value when it is not swept"))),
        };
        let kt = fixed(kt, &m.kt, "kT")?;
        let gamma = fixed(gamma, &m.gamma, "gamma")?;
        let cutoff = fixed(cutoff, &m.cutoff, "Omega")?;
        CLParams::new(m.omega0, m.m0, gamma, cutoff, kt, m.hbar).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Displacement of the `+x` state in scaled coordinates.
    pub fn displacement(&self) -> Vector2<f64> {
        let m = &self.model;
        let q0 = self.pair.q.unwrap_or(4.0 * m.hbar.sqrt() / (2.0 * m.m0 * m.omega0).sqrt());
        let s = (m.m0 * m.omega0).sqrt();
        Vector2::new(q0 * s, self.pair.p / s)
    }

    pub fn time_grid(&self) -> Vec<f64> {
        let n = self.time.n_steps;
        (0..=n)
            .map(|k| match k {
                0 => 0.0,
                k if k == n => self.time.t_max,
                k => self.time.t_max * k as f64 / n as f64,
            })
            .collect()
    }

    pub fn orderings(&self) -> Vec<Ordering> {
        self.distances.orderings.iter().map(|s| Ordering::new(*s).expect("validated")).collect()
    }

    pub fn sstar_pair(&self) -> phaseflow::Result<(GaussianMixtureState, GaussianMixtureState)> {
        let h = self.model.hbar;
        let [[a, b], [c, d]] = self.sstar.sigma;
        if b != c {
            return Err(phaseflow::Error::InvalidArgument("sigma must be symmetric".into()));
        }
        let sigma = Matrix2::new(a, b, c, d) * h;
        let mu = Vector2::new(self.sstar.mu[0], self.sstar.mu[1]);
        let st = |m: Vector2<f64>| GaussianMixtureState::single(GaussianComponent::new_physical(m, sigma, h)?, h);
        Ok((st(mu)?, st(-mu)?))
    }
}
