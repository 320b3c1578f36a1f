//! Time steppers: first-order IMEX and second-order BDF2, diffusion implicit and
//! reaction explicit, without stabilization terms.
//!
//! IMEX1: `(u¹ - u⁰)/τ = κ²Δu¹ + f(u⁰)`, i.e. `u¹ = (1 - τκ²Δ)^{-1}(u⁰ + τf(u⁰))`.
//!
//! BDF2: `(3uⁿ⁺¹ - 4uⁿ + uⁿ⁻¹)/(2τ) = κ²Δuⁿ⁺¹ + 2f(uⁿ) - f(uⁿ⁻¹)`, started with one
//! IMEX1 step.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::grid::{Field, GridError};
use crate::models::{ModelError, ModelSpec};
use crate::spectral::{SpectralError, SpectralOps};

pub type ObserverError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("time step must be positive and finite, got {0}")]
    InvalidTau(f64),
    #[error("number of steps must be at least 1")]
    NoSteps,
    #[error("state belongs to scheme {found}, expected {expected}")]
    WrongScheme { expected: SchemeKind, found: SchemeKind },
    #[error("BDF2 step needs the previous iterate (step index {0})")]
    MissingPrevious(usize),
    #[error("non-finite value {value} at grid index {index} after step {step}")]
    NonFinite { step: usize, index: usize, value: f64 },
    #[error("initial field is not finite: {0}")]
    NonFiniteInitial(GridError),
    #[error("observer failed at step {step}: {source}")]
    Observer { step: usize, source: ObserverError },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Imex1,
    Bdf2,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Imex1 => "imex1",
            SchemeKind::Bdf2 => "bdf2",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "imex1" => Ok(SchemeKind::Imex1),
            "bdf2" => Ok(SchemeKind::Bdf2),
            other => Err(format!("unknown scheme '{other}' (expected 'imex1' or 'bdf2')")),
        }
    }
}

/// Stepper state. `u_prev` is present exactly when `step_index >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeState {
    scheme: SchemeKind,
    model: ModelSpec,
    tau: f64,
    step_index: usize,
    u_curr: Field,
    u_prev: Option<Field>,
}

fn check_tau(tau: f64) -> Result<(), SchemeError> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(SchemeError::InvalidTau(tau))
    }
}

impl SchemeState {
    pub fn initial(
        scheme: SchemeKind,
        model: ModelSpec,
        tau: f64,
        u0: Field,
    ) -> Result<Self, SchemeError> {
        check_tau(tau)?;
        u0.check_finite().map_err(SchemeError::NonFiniteInitial)?;
        Ok(Self {
            scheme,
            model,
            tau,
            step_index: 0,
            u_curr: u0,
            u_prev: None,
        })
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn model(&self) -> ModelSpec {
        self.model
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn t(&self) -> f64 {
        self.step_index as f64 * self.tau
    }

    pub fn u_curr(&self) -> &Field {
        &self.u_curr
    }

    pub fn u_prev(&self) -> Option<&Field> {
        self.u_prev.as_ref()
    }

    fn push(&mut self, next: Field) -> Result<(), SchemeError> {
        let step = self.step_index + 1;
        next.check_finite().map_err(|e| match e {
            GridError::NonFinite { index, value } => SchemeError::NonFinite { step, index, value },
            other => SchemeError::Grid(other),
        })?;
        self.u_prev = Some(std::mem::replace(&mut self.u_curr, next));
        self.step_index = step;
        Ok(())
    }

    /// Advances one step in place. A BDF2 state at step 0 takes its IMEX1 start step.
    pub fn advance(&mut self, ops: &SpectralOps) -> Result<(), SchemeError> {
        let next = match (self.scheme, &self.u_prev) {
            (SchemeKind::Imex1, _) | (SchemeKind::Bdf2, None) => {
                imex1_update(ops, &self.model, self.tau, &self.u_curr)?
            }
            (SchemeKind::Bdf2, Some(prev)) => {
                bdf2_update(ops, &self.model, self.tau, &self.u_curr, prev)?
            }
        };
        self.push(next)
    }

    /// Diagnostic row for the current iterate.
    pub fn record(&self, ops: &SpectralOps) -> StepRecord {
        let energy = self.model.energy(ops, &self.u_curr);
        let modified_energy = match (self.scheme, &self.u_prev) {
            (SchemeKind::Bdf2, Some(prev)) => {
                let inc = self.u_curr.zip_with(prev, |a, b| a - b).expect("shared grid");
                Some(energy + inc.norm_sq() / (4.0 * self.tau))
            }
            _ => None,
        };
        let (u_min, u_max) = (self.u_curr.min(), self.u_curr.max());
        StepRecord {
            step_index: self.step_index,
            t: self.t(),
            energy,
            modified_energy,
            u_min,
            u_max,
            linf: u_min.abs().max(u_max.abs()),
        }
    }
}

/// `(1 - τκ²Δ)^{-1}(u + τ f(u))`.
pub fn imex1_update(
    ops: &SpectralOps,
    model: &ModelSpec,
    tau: f64,
    u: &Field,
) -> Result<Field, SchemeError> {
    check_tau(tau)?;
    let kind = model.kind();
    let rhs = u.map(|v| v + tau * kind.reaction(v));
    Ok(ops.helmholtz_solve(&rhs, model.kappa(), 1.0, tau)?)
}

/// `(3/2 - τκ²Δ)^{-1}(2uⁿ - uⁿ⁻¹/2 + τ(2f(uⁿ) - f(uⁿ⁻¹)))`.
pub fn bdf2_update(
    ops: &SpectralOps,
    model: &ModelSpec,
    tau: f64,
    u_curr: &Field,
    u_prev: &Field,
) -> Result<Field, SchemeError> {
    check_tau(tau)?;
    let kind = model.kind();
    let rhs = u_curr.zip_with(u_prev, |a, b| {
        2.0 * a - 0.5 * b + tau * (2.0 * kind.reaction(a) - kind.reaction(b))
    })?;
    Ok(ops.helmholtz_solve(&rhs, model.kappa(), 1.5, tau)?)
}

pub fn imex1_step(ops: &SpectralOps, state: &SchemeState) -> Result<SchemeState, SchemeError> {
    if state.scheme != SchemeKind::Imex1 {
        return Err(SchemeError::WrongScheme {
            expected: SchemeKind::Imex1,
            found: state.scheme,
        });
    }
    let mut next = state.clone();
    next.advance(ops)?;
    Ok(next)
}

pub fn bdf2_step(ops: &SpectralOps, state: &SchemeState) -> Result<SchemeState, SchemeError> {
    if state.scheme != SchemeKind::Bdf2 {
        return Err(SchemeError::WrongScheme {
            expected: SchemeKind::Bdf2,
            found: state.scheme,
        });
    }
    if state.u_prev.is_none() {
        return Err(SchemeError::MissingPrevious(state.step_index));
    }
    let mut next = state.clone();
    next.advance(ops)?;
    Ok(next)
}

/// BDF2 state at step 1: `u_prev = u0` and `u_curr` one IMEX1 step later.
pub fn kickstart_bdf2(
    ops: &SpectralOps,
    u0: Field,
    model: ModelSpec,
    tau: f64,
) -> Result<SchemeState, SchemeError> {
    let mut state = SchemeState::initial(SchemeKind::Bdf2, model, tau, u0)?;
    state.advance(ops)?;
    Ok(state)
}

/// One diagnostic row per iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step_index: usize,
    pub t: f64,
    pub energy: f64,
    pub modified_energy: Option<f64>,
    pub u_min: f64,
    pub u_max: f64,
    pub linf: f64,
}

/// Hook called for every iterate, including the initial one.
pub trait StepObserver {
    fn observe(&mut self, state: &SchemeState, record: &StepRecord) -> Result<(), ObserverError>;
}

/// Runs `n_steps` steps from `u0` and returns `n_steps + 1` records (steps `0..=n_steps`).
pub fn run(
    ops: &SpectralOps,
    u0: Field,
    model: ModelSpec,
    scheme: SchemeKind,
    tau: f64,
    n_steps: usize,
    observers: &mut [&mut dyn StepObserver],
) -> Result<Vec<StepRecord>, SchemeError> {
    if n_steps == 0 {
        return Err(SchemeError::NoSteps);
    }
    let mut state = SchemeState::initial(scheme, model, tau, u0)?;
    let mut records = Vec::with_capacity(n_steps + 1);
    let mut emit = |state: &SchemeState, records: &mut Vec<StepRecord>| {
        let record = state.record(ops);
        for obs in observers.iter_mut() {
            obs.observe(state, &record).map_err(|source| SchemeError::Observer {
                step: state.step_index,
                source,
            })?;
        }
        records.push(record);
        Ok::<(), SchemeError>(())
    };
    emit(&state, &mut records)?;
    for _ in 0..n_steps {
        state.advance(ops)?;
        emit(&state, &mut records)?;
    }
    Ok(records)
}

/// Like [`run`] but only returns the final state, without diagnostics.
pub fn integrate_to(
    ops: &SpectralOps,
    u0: Field,
    model: ModelSpec,
    scheme: SchemeKind,
    tau: f64,
    n_steps: usize,
) -> Result<SchemeState, SchemeError> {
    let mut state = SchemeState::initial(scheme, model, tau, u0)?;
    for _ in 0..n_steps {
        state.advance(ops)?;
    }
    Ok(state)
}
