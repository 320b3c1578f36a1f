//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 runtime
//! failure, 3 a selected monitor fired.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{
    Duration, ExperimentConfig, InitialCondition, MonitorSet, Preset, DEFAULT_T_FINAL_1D,
    DEFAULT_T_FINAL_2D,
};
use crate::diagnostics::{evaluate_monitors, stability_sweep, MonitorReport, RunReports};
use crate::grid::TorusGrid;
use crate::models::{ModelKind, ModelSpec};
use crate::output::{self, fmt_f64};
use crate::schemes::{run, ObserverError, SchemeKind, SchemeState, StepObserver, StepRecord};
use crate::snapshot;
use crate::spectral::SpectralOps;
use crate::steady_states::{
    kink_residual, residual_window, PeriodicOrbit, Sign, SteadyStateCase,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_MONITOR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "psg", version, about = "Pseudo-spectral sine-Gordon / Allen-Cahn gradient flows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one configuration and write its diagnostics.
    Run(RunArgs),
    /// Repeat a run for several time steps and tabulate the monitors.
    Sweep(SweepArgs),
    /// Sample a steady state of the sine-Gordon equation.
    Steady(SteadyArgs),
    /// Tabulate both potentials on [-2π, 2π].
    Potential(PotentialArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MonitorName {
    Energy,
    Maxp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SteadyKind {
    Kink,
    Periodic,
    Constant,
    Zero,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[arg(long, default_value = "sg")]
    pub model: ModelKind,
    #[arg(long, default_value = "imex1")]
    pub scheme: SchemeKind,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub kappa: f64,
    /// Nodes per axis (even, at least 4).
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Final time; defaults to 42 in 1D and 6 in 2D.
    #[arg(long, conflicts_with = "steps")]
    pub tfinal: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Preset (pi_sin, pi_sin_sin, sin_sin) or a snapshot path.
    #[arg(long)]
    pub init: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub tau: f64,
    /// Write a snapshot every K steps (the final step is always written).
    #[arg(long)]
    pub snap_every: Option<usize>,
    /// Monitors whose violation makes the run exit with status 3.
    #[arg(long, value_delimiter = ',')]
    pub monitors: Vec<MonitorName>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub tau_list: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SteadyArgs {
    #[arg(long)]
    pub case: SteadyKind,
    #[arg(long)]
    pub kappa: f64,
    /// Kink shift.
    #[arg(long = "c", default_value_t = 0.0)]
    pub shift: f64,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub sign: Sign,
    /// First-integral value of a periodic orbit, in (-1, 1).
    #[arg(long = "C", allow_hyphen_values = true)]
    pub first_integral: Option<f64>,
    /// Profile samples.
    #[arg(long, default_value_t = 512)]
    pub points: usize,
    /// Gauss-Legendre nodes for the elliptic integrals.
    #[arg(long, default_value_t = 64)]
    pub quad_points: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl ToString) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Parses `args` (program name first), executes, and returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Steady(a) => cmd_steady(&a, out),
        Command::Potential(a) => cmd_potential(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

/// With `check_steps`, a final time that `tau` does not divide is a usage error.
fn build_config(p: &ProblemArgs, tau: f64, check_steps: bool) -> Result<ExperimentConfig, CliError> {
    let grid = TorusGrid::new(p.dim, p.n).map_err(usage)?;
    let model = ModelSpec::new(p.model, p.kappa).map_err(usage)?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(usage(format!("time step must be positive and finite, got {tau}")));
    }
    let duration = match (p.tfinal, p.steps) {
        (Some(t), _) => Duration::FinalTime(t),
        (None, Some(k)) => Duration::Steps(k),
        (None, None) if p.dim == 1 => Duration::FinalTime(DEFAULT_T_FINAL_1D),
        (None, None) => Duration::FinalTime(DEFAULT_T_FINAL_2D),
    };
    let initial = match p.init.parse::<Preset>() {
        Ok(preset) => InitialCondition::Preset(preset),
        Err(_) => {
            let path = Path::new(&p.init);
            if !path.exists() {
                return Err(usage(format!(
                    "'{}' is neither a preset (pi_sin, pi_sin_sin, sin_sin) nor an existing file",
                    p.init
                )));
            }
            let snap = snapshot::read(path)
                .map_err(|e| runtime(format!("reading {}: {e}", path.display())))?;
            InitialCondition::Field(snap.field)
        }
    };
    let mut config = ExperimentConfig::new(model, p.scheme, grid, tau, duration, initial);
    config.output_dir = Some(p.out.clone());
    config.initial_field().map_err(usage)?;
    if check_steps {
        config.n_steps().map_err(usage)?;
    }
    Ok(config)
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| runtime(format!("creating {}: {e}", dir.display())))
}

/// Writes `snap_<step>.psg` (and `heat_<step>.pgm` in 2D) every `stride` steps
/// and at the final step.
struct SnapshotWriter {
    dir: PathBuf,
    stride: Option<usize>,
    final_step: usize,
}

impl StepObserver for SnapshotWriter {
    fn observe(&mut self, state: &SchemeState, _record: &StepRecord) -> Result<(), ObserverError> {
        let k = state.step_index();
        let due = k == self.final_step || self.stride.is_some_and(|s| k % s == 0);
        if !due {
            return Ok(());
        }
        let u = state.u_curr();
        snapshot::write(
            &self.dir.join(format!("snap_{k}.psg")),
            state.t(),
            state.model().kappa(),
            u,
        )?;
        if u.grid().dim() == 2 {
            output::write_heatmap(&self.dir.join(format!("heat_{k}.pgm")), u)?;
        }
        Ok(())
    }
}

fn monitor_summary(r: &MonitorReport) -> String {
    match r.first_violation_step {
        Some(k) => format!("violated (first at step {k}, worst excess {})", fmt_f64(r.worst_excess)),
        None => "clean".to_string(),
    }
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.snap_every == Some(0) {
        return Err(usage("--snap-every must be at least 1"));
    }
    let config = build_config(&a.problem, a.tau, true)?;
    let monitors = MonitorSet {
        energy: a.monitors.contains(&MonitorName::Energy),
        max_principle: a.monitors.contains(&MonitorName::Maxp),
    };
    let dir = &a.problem.out;
    create_dir(dir)?;

    let ops = SpectralOps::new(config.grid);
    let n_steps = config.n_steps().map_err(usage)?;
    let u0 = config.initial_field().map_err(usage)?;
    let mut writer = SnapshotWriter {
        dir: dir.clone(),
        stride: a.snap_every,
        final_step: n_steps,
    };
    let records = run(&ops, u0, config.model, config.scheme, config.tau, n_steps, &mut [&mut writer])
        .map_err(runtime)?;
    let reports = evaluate_monitors(config.scheme, &records).map_err(runtime)?;
    output::write_series(&dir.join("series.csv"), &records).map_err(runtime)?;
    output::write_report(&dir.join("report.txt"), &run_report(&config, n_steps, &reports))
        .map_err(runtime)?;

    let _ = writeln!(out, "steps: {n_steps}");
    let _ = writeln!(out, "final_energy: {}", fmt_f64(reports.final_energy));
    let _ = writeln!(out, "dissipation: {}", monitor_summary(&reports.dissipation));
    let _ = writeln!(out, "max_principle: {}", monitor_summary(&reports.max_principle));

    let fired = (monitors.energy && reports.dissipation.violated())
        || (monitors.max_principle && reports.max_principle.violated());
    Ok(if fired { EXIT_MONITOR } else { EXIT_OK })
}

fn run_report(config: &ExperimentConfig, n_steps: usize, r: &RunReports) -> Vec<(&'static str, String)> {
    let grid = config.grid;
    vec![
        ("model", config.model.kind().to_string()),
        ("scheme", config.scheme.to_string()),
        ("dim", grid.dim().to_string()),
        ("n", grid.n_per_axis().to_string()),
        ("kappa", fmt_f64(config.model.kappa())),
        ("tau", fmt_f64(config.tau)),
        ("steps", n_steps.to_string()),
        ("t_final", fmt_f64(n_steps as f64 * config.tau)),
        ("init", config.initial_label()),
        ("final_energy", fmt_f64(r.final_energy)),
        ("energy_monitor", monitor_summary(&r.energy)),
        ("dissipation_monitor", format!("{} ({})", monitor_summary(&r.dissipation), r.dissipation.kind)),
        ("max_principle_monitor", monitor_summary(&r.max_principle)),
    ]
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let first = *a.tau_list.first().ok_or_else(|| usage("--tau-list is empty"))?;
    if let Some(bad) = a.tau_list.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(usage(format!("time step must be positive and finite, got {bad}")));
    }
    let config = build_config(&a.problem, first, false)?;
    create_dir(&a.problem.out)?;
    let result = stability_sweep(&config, &a.tau_list).map_err(runtime)?;
    output::write_sweep(&a.problem.out.join("sweep.csv"), &result).map_err(runtime)?;

    let mut failed = false;
    for e in &result.entries {
        match &e.outcome {
            Ok(r) => {
                let _ = writeln!(
                    out,
                    "tau {}: dissipation {}, max_principle {}",
                    e.tau,
                    monitor_summary(&r.dissipation),
                    monitor_summary(&r.max_principle)
                );
            }
            Err(err) => {
                failed = true;
                let _ = writeln!(out, "tau {}: failed: {err}", e.tau);
            }
        }
    }
    let show = |v: Option<f64>| v.map_or("none".to_string(), |t| t.to_string());
    let _ = writeln!(out, "largest_clean_tau: {}", show(result.largest_clean_tau()));
    let _ = writeln!(out, "smallest_violating_tau: {}", show(result.smallest_violating_tau()));
    Ok(if failed { EXIT_RUNTIME } else { EXIT_OK })
}

fn profile_csv(xs: &[f64], us: &[f64]) -> String {
    let mut s = String::from("x,u\n");
    for (x, u) in xs.iter().zip(us) {
        s.push_str(&format!("{},{}\n", fmt_f64(*x), fmt_f64(*u)));
    }
    s
}

fn cmd_steady(a: &SteadyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.points < 5 {
        return Err(usage("--points must be at least 5"));
    }
    let n = a.points;
    let (regime, amplitude, period, xs, us, residual) = match a.case {
        SteadyKind::Periodic => {
            let c = a
                .first_integral
                .ok_or_else(|| usage("--C is required for periodic orbits"))?;
            let orbit = PeriodicOrbit::build(c, a.kappa, a.quad_points).map_err(usage)?;
            let h = orbit.period() / n as f64;
            let xs: Vec<f64> = (0..n).map(|j| j as f64 * h).collect();
            let us = orbit.sample_period(n);
            let res = orbit.residual(n);
            (orbit.case().regime, orbit.amplitude(), Some(orbit.period()), xs, us, res)
        }
        kind => {
            let case = match kind {
                SteadyKind::Kink => SteadyStateCase::kink(a.kappa, a.sign, a.shift),
                SteadyKind::Constant => SteadyStateCase::constant_pi(a.kappa, a.sign),
                _ => SteadyStateCase::zero(a.kappa),
            }
            .map_err(usage)?;
            let h = 2.0 * PI / (n - 1) as f64;
            let xs: Vec<f64> = (0..n).map(|j| -PI + j as f64 * h).collect();
            let us: Vec<f64> = xs.iter().map(|&x| case.eval(x).unwrap_or(0.0)).collect();
            let res = if kind == SteadyKind::Kink {
                kink_residual(a.kappa, a.sign, a.shift, &xs)
            } else {
                residual_window(&us, h, a.kappa)
            };
            (case.regime, case.amplitude, None, xs, us, res)
        }
    };
    create_dir(&a.out)?;
    let path = a.out.join("profile.csv");
    fs::write(&path, profile_csv(&xs, &us))
        .map_err(|e| runtime(format!("writing {}: {e}", path.display())))?;
    let _ = writeln!(out, "regime: {regime}");
    let _ = writeln!(out, "amplitude: {}", fmt_f64(amplitude));
    if let Some(p) = period {
        let _ = writeln!(out, "period: {}", fmt_f64(p));
    }
    let _ = writeln!(out, "residual: {}", fmt_f64(residual));
    Ok(EXIT_OK)
}

fn cmd_potential(a: &PotentialArgs, _out: &mut dyn Write) -> Result<i32, CliError> {
    create_dir(&a.out)?;
    let path = a.out.join("potential.csv");
    output::write_potential(&path).map_err(|e| runtime(format!("writing {}: {e}", path.display())))?;
    Ok(EXIT_OK)
}
