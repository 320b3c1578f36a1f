//! Experiment configuration and the named initial conditions.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::grid::{Field, GridError, TorusGrid};
use crate::models::{ModelError, ModelSpec};
use crate::schemes::SchemeKind;

/// Commensurability tolerance for `t_final / τ`.
pub const STEP_COUNT_TOL: f64 = 1e-9;

/// Final time used by 2D runs when neither a final time nor a step count is given.
pub const DEFAULT_T_FINAL_2D: f64 = 6.0;

/// Final time used by 1D runs when neither a final time nor a step count is given.
pub const DEFAULT_T_FINAL_1D: f64 = 42.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("time step must be positive and finite, got {0}")]
    InvalidTau(f64),
    #[error("final time {t_final} is not an integer multiple of tau = {tau}")]
    NotCommensurate { t_final: f64, tau: f64 },
    #[error("final time must be positive and finite, got {0}")]
    InvalidFinalTime(f64),
    #[error("step count must be at least 1")]
    ZeroSteps,
    #[error("initial condition '{name}' is {preset_dim}D but the grid is {grid_dim}D")]
    DimensionMismatch {
        name: &'static str,
        preset_dim: usize,
        grid_dim: usize,
    },
    #[error("initial field lives on {found:?}, expected {expected:?}")]
    GridMismatch { expected: TorusGrid, found: TorusGrid },
    #[error("unknown initial condition '{0}' (expected pi_sin, pi_sin_sin or sin_sin)")]
    UnknownPreset(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Closed-form initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `π sin x` (1D).
    PiSin,
    /// `π sin x sin y` (2D).
    PiSinSin,
    /// `sin x sin y` (2D).
    SinSin,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::PiSin => "pi_sin",
            Preset::PiSinSin => "pi_sin_sin",
            Preset::SinSin => "sin_sin",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Preset::PiSin => 1,
            Preset::PiSinSin | Preset::SinSin => 2,
        }
    }

    pub fn field(self, grid: TorusGrid) -> Result<Field, ConfigError> {
        if grid.dim() != self.dim() {
            return Err(ConfigError::DimensionMismatch {
                name: self.name(),
                preset_dim: self.dim(),
                grid_dim: grid.dim(),
            });
        }
        Ok(match self {
            Preset::PiSin => Field::from_fn(grid, |x, _| PI * x.sin()),
            Preset::PiSinSin => Field::from_fn(grid, |x, y| PI * x.sin() * y.sin()),
            Preset::SinSin => Field::from_fn(grid, |x, y| x.sin() * y.sin()),
        })
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pi_sin" => Ok(Preset::PiSin),
            "pi_sin_sin" => Ok(Preset::PiSinSin),
            "sin_sin" => Ok(Preset::SinSin),
            other => Err(ConfigError::UnknownPreset(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Preset(Preset),
    /// Arbitrary data, typically loaded from a snapshot file.
    Field(Field),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Duration {
    FinalTime(f64),
    Steps(usize),
}

/// Which monitors decide the exit status of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MonitorSet {
    pub energy: bool,
    pub max_principle: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub scheme: SchemeKind,
    pub grid: TorusGrid,
    pub tau: f64,
    pub duration: Duration,
    pub initial: InitialCondition,
    pub output_dir: Option<PathBuf>,
    pub snapshot_stride: Option<usize>,
    pub monitors: MonitorSet,
}

/// Number of steps of size `tau` reaching `t_final` exactly.
pub fn steps_for(t_final: f64, tau: f64) -> Result<usize, ConfigError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(ConfigError::InvalidTau(tau));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(ConfigError::InvalidFinalTime(t_final));
    }
    let ratio = t_final / tau;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > STEP_COUNT_TOL || rounded < 1.0 {
        return Err(ConfigError::NotCommensurate { t_final, tau });
    }
    Ok(rounded as usize)
}

impl ExperimentConfig {
    pub fn new(
        model: ModelSpec,
        scheme: SchemeKind,
        grid: TorusGrid,
        tau: f64,
        duration: Duration,
        initial: InitialCondition,
    ) -> Self {
        Self {
            model,
            scheme,
            grid,
            tau,
            duration,
            initial,
            output_dir: None,
            snapshot_stride: None,
            monitors: MonitorSet::default(),
        }
    }

    /// 1D sine-Gordon, `κ = 0.1`, `u₀ = π sin x`, 256 modes, `T = 42`.
    pub fn sg_1d_pi_sin(tau: f64) -> Result<Self, ConfigError> {
        Ok(Self::new(
            ModelSpec::sine_gordon(0.1)?,
            SchemeKind::Imex1,
            TorusGrid::one_d(256)?,
            tau,
            Duration::FinalTime(42.0),
            InitialCondition::Preset(Preset::PiSin),
        ))
    }

    /// 2D sine-Gordon with BDF2, `κ = 0.2`, `u₀ = π sin x sin y`, 256² modes.
    pub fn sg_2d_pi_sin_sin(tau: f64) -> Result<Self, ConfigError> {
        Ok(Self::new(
            ModelSpec::sine_gordon(0.2)?,
            SchemeKind::Bdf2,
            TorusGrid::two_d(256)?,
            tau,
            Duration::FinalTime(DEFAULT_T_FINAL_2D),
            InitialCondition::Preset(Preset::PiSinSin),
        ))
    }

    /// 2D Allen-Cahn with BDF2, `κ = 0.2`, `u₀ = sin x sin y`, 256² modes.
    pub fn ac_2d_sin_sin(tau: f64) -> Result<Self, ConfigError> {
        Ok(Self::new(
            ModelSpec::allen_cahn(0.2)?,
            SchemeKind::Bdf2,
            TorusGrid::two_d(256)?,
            tau,
            Duration::FinalTime(DEFAULT_T_FINAL_2D),
            InitialCondition::Preset(Preset::SinSin),
        ))
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        Self {
            tau,
            ..self.clone()
        }
    }

    pub fn initial_field(&self) -> Result<Field, ConfigError> {
        match &self.initial {
            InitialCondition::Preset(p) => p.field(self.grid),
            InitialCondition::Field(f) => {
                if f.grid() != self.grid {
                    return Err(ConfigError::GridMismatch {
                        expected: self.grid,
                        found: f.grid(),
                    });
                }
                Ok(f.clone())
            }
        }
    }

    pub fn n_steps(&self) -> Result<usize, ConfigError> {
        match self.duration {
            Duration::Steps(0) => Err(ConfigError::ZeroSteps),
            Duration::Steps(k) => {
                if !(self.tau > 0.0 && self.tau.is_finite()) {
                    return Err(ConfigError::InvalidTau(self.tau));
                }
                Ok(k)
            }
            Duration::FinalTime(t) => steps_for(t, self.tau),
        }
    }

    pub fn initial_label(&self) -> String {
        match &self.initial {
            InitialCondition::Preset(p) => p.name().to_string(),
            InitialCondition::Field(_) => "snapshot".to_string(),
        }
    }
}
