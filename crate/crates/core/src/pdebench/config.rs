use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{BenchError, ExactSolution, Grid};

/// A benchmark run read from TOML:
///
/// ```toml
/// threshold = 1e-6
/// exact = false           # sample the closed form instead of evolving
///
/// [grid]
/// length = 40.0
/// n = 512
///
/// [time]
/// t_max = 1.0
/// dt = 1e-3
/// save_every = 100
///
/// [initial]
/// kind = "mkdv-soliton"   # or "sg-kink", "gaussian", "zero"
/// amplitude = 1.0
/// width = 1.0             # gaussian only
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub initial: InitialCondition,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub length: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max: f64,
    pub dt: f64,
    #[serde(default = "default_save_every")]
    pub save_every: usize,
}

fn default_threshold() -> f64 {
    1e-6
}

fn default_save_every() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    MkdvSoliton { amplitude: f64 },
    SgKink { amplitude: f64 },
    Gaussian { amplitude: f64, width: f64 },
    Zero,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| BenchError::Invalid(e.to_string()))?;
        cfg.grid()?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<Grid, BenchError> {
        Grid::new(self.grid.length, self.grid.n)
    }

    /// Times at which snapshots are saved, matching the evolvers.
    pub fn save_times(&self) -> Vec<f64> {
        let steps = (self.time.t_max / self.time.dt - 1e-9).ceil().max(0.0) as usize;
        if steps == 0 {
            return vec![0.0];
        }
        let dt = self.time.t_max / steps as f64;
        let every = self.time.save_every.max(1);
        (0..=steps)
            .filter(|s| s % every == 0 || *s == steps)
            .map(|s| s as f64 * dt)
            .collect()
    }
}

impl InitialCondition {
    pub fn exact(&self) -> Option<ExactSolution> {
        match *self {
            InitialCondition::MkdvSoliton { amplitude } => Some(ExactSolution::MkdvSoliton { a: amplitude }),
            InitialCondition::SgKink { amplitude } => Some(ExactSolution::SgKink { a: amplitude }),
            _ => None,
        }
    }

    /// Initial `q` for MKdV runs.
    pub fn sample_q(&self, grid: &Grid) -> Vec<f64> {
        grid.points()
            .iter()
            .map(|&x| match *self {
                InitialCondition::MkdvSoliton { amplitude: a } | InitialCondition::SgKink { amplitude: a } => {
                    ExactSolution::MkdvSoliton { a }.q_jets(x, 0.0, 0)[0]
                }
                InitialCondition::Gaussian { amplitude, width } => amplitude * (-(x / width).powi(2)).exp(),
                InitialCondition::Zero => 0.0,
            })
            .collect()
    }

    /// Initial potential `u` for sine-Gordon runs. A gaussian is added on
    /// top of the zero vacuum.
    pub fn sample_u(&self, grid: &Grid) -> Vec<f64> {
        grid.points()
            .iter()
            .map(|&x| match *self {
                InitialCondition::SgKink { amplitude: a } | InitialCondition::MkdvSoliton { amplitude: a } => {
                    ExactSolution::SgKink { a }.u(x, 0.0).unwrap()
                }
                InitialCondition::Gaussian { amplitude, width } => amplitude * (-(x / width).powi(2)).exp(),
                InitialCondition::Zero => 0.0,
            })
            .map(|u| if u.is_finite() { u } else { 2.0 * PI })
            .collect()
    }
}
