//! Run configuration, read from JSON and overridable field by field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::closed_form::InitialState;
use crate::error::{Error, Result};
use crate::flow::RegionSpec;
use crate::reservoir::SpectralModel;
use crate::volterra::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Curves,
    RegionMap,
    Trajectory,
    CrossCheck,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Destination file; standard output when absent.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub dt: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    /// Informational; the swept quantity is fixed by the spectral family.
    #[serde(default)]
    pub param_name: Option<String>,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

fn default_alpha_list() -> Vec<f64> {
    vec![0.1, 0.3, 0.5, 0.7, 0.9]
}

fn default_q_points() -> usize {
    1001
}

fn default_time_samples() -> usize {
    500
}

fn default_workers() -> usize {
    1
}

fn default_seed() -> u64 {
    0x5eed
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Initial-state weight for region maps and trajectories.
    #[serde(default)]
    pub alpha_sq: Option<f64>,
    /// Initial-state weights for curve tables.
    #[serde(default = "default_alpha_list")]
    pub alpha_list: Vec<f64>,
    /// Number of `q` samples on `[0, 1]` in curve tables.
    #[serde(default = "default_q_points")]
    pub q_points: usize,
    #[serde(default)]
    pub spectral: Option<SpectralModel>,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub sweep: Option<SweepRange>,
    #[serde(default = "default_time_samples")]
    pub time_samples: usize,
    #[serde(default)]
    pub output: OutputConfig,
    /// Thread count; not embedded in outputs, which do not depend on it.
    #[serde(default = "default_workers", skip_serializing)]
    pub workers: usize,
    /// Seed for randomised cross-checks.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// `gamma0 t in (0, 40]` for Lorentzian reservoirs, long enough to contain
/// the first revival of `q` across `lambda/gamma0 in [0.02, 2)`;
/// `omega0 t in (0, 10]` for Ohmic-like ones.
pub fn default_t_max(model: &SpectralModel) -> f64 {
    match *model {
        SpectralModel::Lorentzian { gamma0, .. } => 40.0 / gamma0,
        SpectralModel::OhmicLike { omega0, .. } => 10.0 / omega0,
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            alpha_sq: None,
            alpha_list: default_alpha_list(),
            q_points: default_q_points(),
            spectral: None,
            solver: SolverSettings::default(),
            sweep: None,
            time_samples: default_time_samples(),
            output: OutputConfig::default(),
            workers: default_workers(),
            seed: default_seed(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_err(format!("malformed config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Checks that the fields the mode needs are present and in range.
    pub fn validate(&self) -> Result<()> {
        if self.workers < 1 {
            return Err(config_err("workers must be at least 1"));
        }
        if let Some(a2) = self.alpha_sq {
            InitialState::new(a2).map_err(|e| config_err(e.to_string()))?;
        }
        match self.mode {
            Mode::Curves => {
                if self.alpha_list.is_empty() {
                    return Err(config_err("curves mode needs a non-empty alpha_list"));
                }
                for &a2 in &self.alpha_list {
                    InitialState::new(a2).map_err(|e| config_err(e.to_string()))?;
                }
                if self.q_points < 2 {
                    return Err(config_err("q_points must be at least 2"));
                }
            }
            Mode::RegionMap | Mode::Trajectory => {
                if self.alpha_sq.is_none() {
                    return Err(config_err("alpha_sq is required for this mode"));
                }
                let model = self.spectral.ok_or_else(|| config_err("spectral is required for this mode"))?;
                model.validate().map_err(|e| config_err(e.to_string()))?;
                self.solver_config(&model)?;
                if self.time_samples < 1 {
                    return Err(config_err("time_samples must be positive"));
                }
                if self.mode == Mode::RegionMap {
                    self.region_spec(&model)?;
                }
            }
            Mode::CrossCheck => {}
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Result<InitialState> {
        let a2 = self.alpha_sq.ok_or_else(|| config_err("alpha_sq is required"))?;
        InitialState::new(a2).map_err(|e| config_err(e.to_string()))
    }

    pub fn model(&self) -> Result<SpectralModel> {
        self.spectral.ok_or_else(|| config_err("spectral is required"))
    }

    /// Solver settings, defaulting to the model's window and step.
    pub fn solver_config(&self, model: &SpectralModel) -> Result<SolverConfig> {
        let t_max = self.solver.t_max.unwrap_or_else(|| default_t_max(model));
        let cfg = match self.solver.dt {
            Some(dt) => SolverConfig::new(t_max, dt),
            None => SolverConfig::default_for(model, t_max),
        };
        cfg.map_err(|e| config_err(e.to_string()))
    }

    /// Sweep axis; defaults to `lambda/gamma0 in [0.02, 1.98]` or `eta in [0.02, 1]`, 50 steps.
    pub fn region_spec(&self, model: &SpectralModel) -> Result<RegionSpec> {
        let (min, max, steps) = match (&self.sweep, model) {
            (Some(s), _) => (s.min, s.max, s.steps),
            (None, SpectralModel::Lorentzian { .. }) => (0.02, 1.98, 50),
            (None, SpectralModel::OhmicLike { .. }) => (0.02, 1.0, 50),
        };
        let spec = RegionSpec { min, max, steps, time_samples: self.time_samples };
        spec.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(spec)
    }
}
