//! The two phase-field models: parabolic sine-Gordon `∂t u = κ²Δu + sin u` and
//! Allen-Cahn `∂t u = κ²Δu + u - u³`.
//!
//! Both are L² gradient flows `∂t u = κ²Δu - F'(u)` of
//! `E(u) = ∫ κ²/2 |∇u|² + F(u) dx`, with `F_SG(u) = cos u` and
//! `F_AC(u) = (u² - 1)²/4`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::grid::{Field, GridError};
use crate::spectral::SpectralOps;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("kappa must be positive and finite, got {0}")]
    InvalidKappa(f64),
    #[error("beta and gamma must be positive and finite (beta = {beta}, gamma = {gamma})")]
    InvalidScaling { beta: f64, gamma: f64 },
    #[error("time step must be positive and finite, got {0}")]
    InvalidTau(f64),
    #[error("unknown model '{0}' (expected 'sg' or 'ac')")]
    UnknownModel(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    SineGordon,
    AllenCahn,
}

impl ModelKind {
    /// Reaction term `f(u) = -F'(u)`.
    pub fn reaction(self, u: f64) -> f64 {
        match self {
            ModelKind::SineGordon => u.sin(),
            ModelKind::AllenCahn => u - u * u * u,
        }
    }

    /// Double-well potential `F(u)`.
    pub fn potential(self, u: f64) -> f64 {
        match self {
            ModelKind::SineGordon => u.cos(),
            ModelKind::AllenCahn => {
                let w = u * u - 1.0;
                0.25 * w * w
            }
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ModelKind::SineGordon => "sg",
            ModelKind::AllenCahn => "ac",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sg" | "sine-gordon" => Ok(ModelKind::SineGordon),
            "ac" | "allen-cahn" => Ok(ModelKind::AllenCahn),
            other => Err(ModelError::UnknownModel(other.to_string())),
        }
    }
}

/// Pointwise reaction term of the model applied to a field.
pub fn nonlinearity(kind: ModelKind, u: &Field) -> Field {
    u.map(|v| kind.reaction(v))
}

/// Potential values at arbitrary sample points.
pub fn potential_values(kind: ModelKind, samples: &[f64]) -> Vec<f64> {
    samples.iter().map(|&u| kind.potential(u)).collect()
}

/// A model together with its interface parameter κ (diffusion constant κ²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    kind: ModelKind,
    kappa: f64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, kappa: f64) -> Result<Self, ModelError> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(ModelError::InvalidKappa(kappa));
        }
        Ok(Self { kind, kappa })
    }

    pub fn sine_gordon(kappa: f64) -> Result<Self, ModelError> {
        Self::new(ModelKind::SineGordon, kappa)
    }

    pub fn allen_cahn(kappa: f64) -> Result<Self, ModelError> {
        Self::new(ModelKind::AllenCahn, kappa)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn nonlinearity(&self, u: &Field) -> Field {
        nonlinearity(self.kind, u)
    }

    /// `E(u) = κ²/2 ∫|∇u|² + ∫F(u)`, gradient term from spectral first derivatives.
    pub fn energy(&self, ops: &SpectralOps, u: &Field) -> f64 {
        let gradient = 0.5 * self.kappa * self.kappa * ops.gradient_norm_sq(u);
        let potential = u.map(|v| self.kind.potential(v)).integrate();
        gradient + potential
    }

    /// `Ẽ = E(u_curr) + ‖u_curr - u_prev‖² / (4τ)`, the quantity BDF2 dissipates.
    pub fn modified_energy(
        &self,
        ops: &SpectralOps,
        u_curr: &Field,
        u_prev: &Field,
        tau: f64,
    ) -> Result<f64, ModelError> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(ModelError::InvalidTau(tau));
        }
        let increment = u_curr.zip_with(u_prev, |a, b| a - b)?;
        Ok(self.energy(ops, u_curr) + increment.norm_sq() / (4.0 * tau))
    }
}

/// Parameters of `∂s v = κ²Δv + γ sin(βv)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralModelParams {
    kappa: f64,
    beta: f64,
    gamma: f64,
}

/// Map from the general form to `∂t u = κ_std²Δu + sin u` via `u = βv`, `t = γβs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rescaling {
    pub standard_kappa: f64,
    pub time_scale: f64,
    pub amplitude_scale: f64,
}

impl GeneralModelParams {
    pub fn new(kappa: f64, beta: f64, gamma: f64) -> Result<Self, ModelError> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(ModelError::InvalidKappa(kappa));
        }
        if !(beta > 0.0 && beta.is_finite() && gamma > 0.0 && gamma.is_finite()) {
            return Err(ModelError::InvalidScaling { beta, gamma });
        }
        Ok(Self { kappa, beta, gamma })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rescale_general_to_standard(&self) -> Rescaling {
        let gb = self.gamma * self.beta;
        Rescaling {
            standard_kappa: (self.kappa * self.kappa / gb).sqrt(),
            time_scale: gb,
            amplitude_scale: self.beta,
        }
    }
}

impl Rescaling {
    /// Standard-form time corresponding to general-form time `s`.
    pub fn standard_time(&self, s: f64) -> f64 {
        self.time_scale * s
    }

    pub fn to_standard(&self, v: &Field) -> Field {
        v.map(|x| self.amplitude_scale * x)
    }

    pub fn to_general(&self, u: &Field) -> Field {
        u.map(|x| x / self.amplitude_scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use std::f64::consts::PI;

    #[test]
    fn reaction_zeros() {
        let g = TorusGrid::one_d(8).unwrap();
        assert!(nonlinearity(ModelKind::SineGordon, &Field::zeros(g)).max_abs() == 0.0);
        assert!(nonlinearity(ModelKind::SineGordon, &Field::constant(g, PI)).max_abs() <= 1e-15);
        assert_eq!(nonlinearity(ModelKind::AllenCahn, &Field::constant(g, 1.0)).max_abs(), 0.0);
    }

    #[test]
    fn potential_samples() {
        let sg = potential_values(ModelKind::SineGordon, &[0.0, PI, -PI]);
        assert_eq!(sg[0], 1.0);
        assert_eq!(sg[1], -1.0);
        assert_eq!(sg[2], -1.0);
        assert_eq!(potential_values(ModelKind::AllenCahn, &[1.0, -1.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn reaction_is_negative_potential_slope() {
        for kind in [ModelKind::SineGordon, ModelKind::AllenCahn] {
            for &u in &[-2.0, -0.3, 0.0, 0.9, 2.5] {
                let h = 1e-6;
                let slope = (kind.potential(u + h) - kind.potential(u - h)) / (2.0 * h);
                assert!((kind.reaction(u) + slope).abs() < 1e-8, "{kind:?} at {u}");
            }
        }
    }

    #[test]
    fn constant_state_energies() {
        let g = TorusGrid::one_d(32).unwrap();
        let ops = SpectralOps::new(g);
        let m = ModelSpec::sine_gordon(0.3).unwrap();
        assert!((m.energy(&ops, &Field::constant(g, PI)) + 2.0 * PI).abs() < 1e-13);
        assert!((m.energy(&ops, &Field::zeros(g)) - 2.0 * PI).abs() < 1e-13);
        let ac = ModelSpec::allen_cahn(0.3).unwrap();
        assert!(ac.energy(&ops, &Field::constant(g, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn modified_energy_examples() {
        let g = TorusGrid::one_d(16).unwrap();
        let ops = SpectralOps::new(g);
        let m = ModelSpec::sine_gordon(1.0).unwrap();
        let u = Field::from_fn(g, |x, _| x.sin());
        let e = m.energy(&ops, &u);
        assert!((m.modified_energy(&ops, &u, &u, 0.3).unwrap() - e).abs() < 1e-15);
        let pi = Field::constant(g, PI);
        let zero = Field::zeros(g);
        let expected = -2.0 * PI + 0.5 * PI * PI * 2.0 * PI;
        let got = m.modified_energy(&ops, &pi, &zero, 0.5).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn modified_energy_rejects_mismatch_and_bad_tau() {
        let ops = SpectralOps::new(TorusGrid::one_d(16).unwrap());
        let m = ModelSpec::sine_gordon(1.0).unwrap();
        let a = Field::zeros(TorusGrid::one_d(16).unwrap());
        let b = Field::zeros(TorusGrid::one_d(8).unwrap());
        assert!(matches!(
            m.modified_energy(&ops, &a, &b, 0.1),
            Err(ModelError::Grid(GridError::GridMismatch { .. }))
        ));
        assert!(matches!(
            m.modified_energy(&ops, &a, &a, 0.0),
            Err(ModelError::InvalidTau(_))
        ));
    }

    #[test]
    fn rescaling_examples() {
        let r = GeneralModelParams::new(0.5, 1.0, 1.0)
            .unwrap()
            .rescale_general_to_standard();
        assert_eq!(
            (r.standard_kappa, r.time_scale, r.amplitude_scale),
            (0.5, 1.0, 1.0)
        );
        let r = GeneralModelParams::new(1.0, 2.0, 2.0)
            .unwrap()
            .rescale_general_to_standard();
        assert!((r.standard_kappa - 0.5).abs() < 1e-15);
        assert_eq!(r.time_scale, 4.0);
        assert_eq!(r.amplitude_scale, 2.0);
        assert!(GeneralModelParams::new(1.0, 0.0, 1.0).is_err());
        assert!(GeneralModelParams::new(1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn rejects_nonpositive_kappa() {
        assert!(ModelSpec::sine_gordon(0.0).is_err());
        assert!(ModelSpec::allen_cahn(f64::NAN).is_err());
    }

    #[test]
    fn parse_model_kind() {
        assert_eq!("sg".parse::<ModelKind>().unwrap(), ModelKind::SineGordon);
        assert_eq!("ac".parse::<ModelKind>().unwrap(), ModelKind::AllenCahn);
        assert!("ch".parse::<ModelKind>().is_err());
    }
}
