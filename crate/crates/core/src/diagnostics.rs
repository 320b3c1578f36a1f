//! Runtime monitors for energy dissipation and the maximum principle, the
//! time-step stability sweep, and temporal convergence-order estimation.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::config::{steps_for, ConfigError, ExperimentConfig};
use crate::schemes::{integrate_to, run, SchemeError, SchemeKind, StepRecord};
use crate::spectral::SpectralOps;

pub const DEFAULT_REL_SLACK: f64 = 1e-10;
pub const DEFAULT_MAXP_SLACK: f64 = 1e-12;
pub const DEFAULT_BOUND: f64 = PI;

/// Environment variable capping the number of sweep worker threads.
pub const THREADS_ENV: &str = "PSG_THREADS";

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("record series is empty")]
    EmptyRecords,
    #[error("modified energy missing at step {0}")]
    MissingModifiedEnergy(usize),
    #[error("time-step list is empty")]
    EmptyTauList,
    #[error("time steps must be positive and finite, got {0}")]
    InvalidTau(f64),
    #[error("convergence study needs at least 3 levels, got {0}")]
    TooFewLevels(usize),
    #[error("convergence study needs at least two positive errors")]
    DegenerateErrors,
    #[error("could not build sweep thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonitorKind {
    EnergyDissipation,
    ModifiedEnergyDissipation,
    MaxPrinciple,
}

impl fmt::Display for MonitorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MonitorKind::EnergyDissipation => "energy_dissipation",
            MonitorKind::ModifiedEnergyDissipation => "modified_energy_dissipation",
            MonitorKind::MaxPrinciple => "max_principle",
        })
    }
}

/// Outcome of one monitor over a record series. `worst_excess` is the largest
/// energy increase (or `‖u‖∞ - bound`) among flagged steps, zero when clean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorReport {
    pub kind: MonitorKind,
    pub first_violation_step: Option<usize>,
    pub worst_excess: f64,
}

impl MonitorReport {
    pub fn violated(&self) -> bool {
        self.first_violation_step.is_some()
    }

    fn scan(kind: MonitorKind, flagged: impl Iterator<Item = (usize, f64)>) -> Self {
        let mut first = None;
        let mut worst = 0.0f64;
        for (step, excess) in flagged {
            first.get_or_insert(step);
            worst = worst.max(excess);
        }
        Self {
            kind,
            first_violation_step: first,
            worst_excess: worst,
        }
    }
}

/// Flags the first step where the (modified) energy grows by more than
/// `rel_slack · (1 + |E_prev|)`. The modified series starts at step 1.
pub fn energy_monitor(
    records: &[StepRecord],
    modified: bool,
    rel_slack: f64,
) -> Result<MonitorReport, DiagnosticsError> {
    if records.is_empty() {
        return Err(DiagnosticsError::EmptyRecords);
    }
    let (kind, series): (_, Vec<(usize, f64)>) = if modified {
        let series = records
            .iter()
            .filter(|r| r.step_index >= 1)
            .map(|r| {
                r.modified_energy
                    .map(|e| (r.step_index, e))
                    .ok_or(DiagnosticsError::MissingModifiedEnergy(r.step_index))
            })
            .collect::<Result<_, _>>()?;
        (MonitorKind::ModifiedEnergyDissipation, series)
    } else {
        let series = records.iter().map(|r| (r.step_index, r.energy)).collect();
        (MonitorKind::EnergyDissipation, series)
    };
    Ok(MonitorReport::scan(
        kind,
        series.windows(2).filter_map(|w| {
            let ((_, prev), (step, next)) = (w[0], w[1]);
            let increase = next - prev;
            (increase > rel_slack * (1.0 + prev.abs())).then_some((step, increase))
        }),
    ))
}

/// Flags the first step with `‖u‖∞ > bound + slack`.
pub fn max_principle_monitor(
    records: &[StepRecord],
    bound: f64,
    slack: f64,
) -> Result<MonitorReport, DiagnosticsError> {
    if records.is_empty() {
        return Err(DiagnosticsError::EmptyRecords);
    }
    Ok(MonitorReport::scan(
        MonitorKind::MaxPrinciple,
        records
            .iter()
            .filter(|r| r.linf > bound + slack)
            .map(|r| (r.step_index, r.linf - bound)),
    ))
}

/// All monitors for one run with default slacks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunReports {
    /// Dissipation of the quantity the scheme guarantees: `E` for IMEX1, `Ẽ` for BDF2.
    pub dissipation: MonitorReport,
    /// Plain energy monitor (may fire for BDF2 without contradicting anything).
    pub energy: MonitorReport,
    pub max_principle: MonitorReport,
    pub final_energy: f64,
    pub steps: usize,
}

pub fn evaluate_monitors(
    scheme: SchemeKind,
    records: &[StepRecord],
) -> Result<RunReports, DiagnosticsError> {
    let energy = energy_monitor(records, false, DEFAULT_REL_SLACK)?;
    let dissipation = match scheme {
        SchemeKind::Imex1 => energy,
        SchemeKind::Bdf2 => energy_monitor(records, true, DEFAULT_REL_SLACK)?,
    };
    let max_principle = max_principle_monitor(records, DEFAULT_BOUND, DEFAULT_MAXP_SLACK)?;
    let last = records.last().ok_or(DiagnosticsError::EmptyRecords)?;
    Ok(RunReports {
        dissipation,
        energy,
        max_principle,
        final_energy: last.energy,
        steps: last.step_index,
    })
}

/// Runs the configuration as given and evaluates every monitor.
pub fn run_with_monitors(
    ops: &SpectralOps,
    config: &ExperimentConfig,
) -> Result<(Vec<StepRecord>, RunReports), DiagnosticsError> {
    let u0 = config.initial_field()?;
    let n = config.n_steps()?;
    let records = run(ops, u0, config.model, config.scheme, config.tau, n, &mut [])?;
    let reports = evaluate_monitors(config.scheme, &records)?;
    Ok((records, reports))
}

#[derive(Debug)]
pub struct SweepEntry {
    pub tau: f64,
    pub outcome: Result<RunReports, DiagnosticsError>,
}

#[derive(Debug)]
pub struct SweepResult {
    pub entries: Vec<SweepEntry>,
}

impl SweepResult {
    pub fn tau_values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.tau).collect()
    }

    pub fn final_energies(&self) -> Vec<Option<f64>> {
        self.entries
            .iter()
            .map(|e| e.outcome.as_ref().ok().map(|r| r.final_energy))
            .collect()
    }

    /// Largest tested τ whose dissipation monitor stayed clean.
    pub fn largest_clean_tau(&self) -> Option<f64> {
        self.entries
            .iter()
            .filter(|e| matches!(&e.outcome, Ok(r) if !r.dissipation.violated()))
            .map(|e| e.tau)
            .reduce(f64::max)
    }

    /// Smallest tested τ whose dissipation monitor fired.
    pub fn smallest_violating_tau(&self) -> Option<f64> {
        self.entries
            .iter()
            .filter(|e| matches!(&e.outcome, Ok(r) if r.dissipation.violated()))
            .map(|e| e.tau)
            .reduce(f64::min)
    }
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn sweep_threads() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs `config` once per time step, in parallel. Failures are recorded per τ.
pub fn stability_sweep(
    config: &ExperimentConfig,
    tau_values: &[f64],
) -> Result<SweepResult, DiagnosticsError> {
    if tau_values.is_empty() {
        return Err(DiagnosticsError::EmptyTauList);
    }
    if let Some(&bad) = tau_values.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(DiagnosticsError::InvalidTau(bad));
    }
    let ops = SpectralOps::new(config.grid);
    let work = || {
        tau_values
            .par_iter()
            .map(|&tau| SweepEntry {
                tau,
                outcome: run_with_monitors(&ops, &config.with_tau(tau)).map(|(_, r)| r),
            })
            .collect::<Vec<_>>()
    };
    let entries = match sweep_threads() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| DiagnosticsError::ThreadPool(e.to_string()))?
            .install(work),
        None => work(),
    };
    Ok(SweepResult { entries })
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Observed order from `(τ, error)` pairs: slope of `log e` against `log τ`.
pub fn observed_order(taus: &[f64], errors: &[f64]) -> Result<f64, DiagnosticsError> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = taus
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e > 0.0)
        .map(|(t, e)| (t.ln(), e.ln()))
        .unzip();
    if lx.len() < 2 {
        return Err(DiagnosticsError::DegenerateErrors);
    }
    Ok(least_squares_slope(&lx, &ly))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub taus: Vec<f64>,
    pub errors: Vec<f64>,
    pub tau_ref: f64,
    pub order: f64,
}

/// Self-convergence study: `τ_l = tau_base / 2^l` for `l < levels`, compared in
/// max-norm at `t_final` against `τ_ref = tau_base / 2^{levels + 2}`.
pub fn convergence_order(
    config: &ExperimentConfig,
    scheme: SchemeKind,
    tau_base: f64,
    levels: usize,
    t_final: f64,
) -> Result<ConvergenceStudy, DiagnosticsError> {
    if levels < 3 {
        return Err(DiagnosticsError::TooFewLevels(levels));
    }
    if !(tau_base > 0.0 && tau_base.is_finite()) {
        return Err(DiagnosticsError::InvalidTau(tau_base));
    }
    let taus: Vec<f64> = (0..levels).map(|l| tau_base / 2f64.powi(l as i32)).collect();
    let tau_ref = tau_base / 2f64.powi(levels as i32 + 2);
    let steps: Vec<usize> = taus
        .iter()
        .map(|&t| steps_for(t_final, t))
        .collect::<Result<_, _>>()?;
    let ref_steps = steps_for(t_final, tau_ref)?;

    let ops = SpectralOps::new(config.grid);
    let u0 = config.initial_field()?;
    let reference = integrate_to(&ops, u0.clone(), config.model, scheme, tau_ref, ref_steps)?;
    let errors = taus
        .par_iter()
        .zip(&steps)
        .map(|(&tau, &n)| {
            let s = integrate_to(&ops, u0.clone(), config.model, scheme, tau, n)?;
            Ok(s.u_curr().max_abs_diff(reference.u_curr()))
        })
        .collect::<Result<Vec<f64>, DiagnosticsError>>()?;
    let order = observed_order(&taus, &errors)?;
    Ok(ConvergenceStudy {
        taus,
        errors,
        tau_ref,
        order,
    })
}
