//! Text and image outputs: time series, heatmaps, potential tables, run reports
//! and sweep summaries.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::diagnostics::SweepResult;
use crate::grid::Field;
use crate::models::{potential_values, ModelKind};
use crate::schemes::StepRecord;

pub const SERIES_HEADER: &str = "step,t,energy,modified_energy,umin,umax,linf";
pub const POTENTIAL_HEADER: &str = "u,F_sg,F_ac";
pub const SWEEP_HEADER: &str = "tau,energy_violated,first_violation_step,maxp_violated,final_energy";

/// Samples in the potential table, `u_i = π (i - 512) / 256`, covering `[-2π, 2π]`.
pub const POTENTIAL_SAMPLES: usize = 1025;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("heatmaps need a 2D field, got {0}D")]
    NotTwoD(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Full-precision float, round-trips through `str::parse::<f64>`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn series_csv(records: &[StepRecord]) -> String {
    let mut s = String::with_capacity(128 * (records.len() + 1));
    s.push_str(SERIES_HEADER);
    s.push('\n');
    for r in records {
        let modified = r.modified_energy.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.step_index,
            fmt_f64(r.t),
            fmt_f64(r.energy),
            modified,
            fmt_f64(r.u_min),
            fmt_f64(r.u_max),
            fmt_f64(r.linf)
        );
    }
    s
}

pub fn write_series(path: &Path, records: &[StepRecord]) -> Result<(), OutputError> {
    fs::write(path, series_csv(records))?;
    Ok(())
}

/// Grey level for one value: `[-π, π]` maps linearly onto `0..=255`, clamped.
pub fn grey_level(u: f64) -> u8 {
    let g = ((u + PI) / (2.0 * PI) * 255.0).round();
    if g.is_nan() {
        0
    } else {
        g.clamp(0.0, 255.0) as u8
    }
}

/// Binary PGM (P5). Image row 0 is `y = -π`, column 0 is `x = -π`.
pub fn heatmap_pgm(field: &Field) -> Result<Vec<u8>, OutputError> {
    let grid = field.grid();
    if grid.dim() != 2 {
        return Err(OutputError::NotTwoD(grid.dim()));
    }
    let n = grid.n_per_axis();
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    out.extend(field.values().iter().map(|&u| grey_level(u)));
    Ok(out)
}

pub fn write_heatmap(path: &Path, field: &Field) -> Result<(), OutputError> {
    fs::write(path, heatmap_pgm(field)?)?;
    Ok(())
}

pub fn potential_table() -> String {
    let us: Vec<f64> = (0..POTENTIAL_SAMPLES)
        .map(|i| PI * (i as f64 - 512.0) / 256.0)
        .collect();
    let sg = potential_values(ModelKind::SineGordon, &us);
    let ac = potential_values(ModelKind::AllenCahn, &us);
    let mut s = String::with_capacity(80 * (POTENTIAL_SAMPLES + 1));
    s.push_str(POTENTIAL_HEADER);
    s.push('\n');
    for ((u, f), g) in us.iter().zip(&sg).zip(&ac) {
        let _ = writeln!(s, "{},{},{}", fmt_f64(*u), fmt_f64(*f), fmt_f64(*g));
    }
    s
}

pub fn write_potential(path: &Path) -> Result<(), OutputError> {
    fs::write(path, potential_table())?;
    Ok(())
}

/// `key: value` lines.
pub fn report_text(entries: &[(&str, String)]) -> String {
    entries
        .iter()
        .map(|(k, v)| format!("{k}: {v}\n"))
        .collect()
}

pub fn write_report(path: &Path, entries: &[(&str, String)]) -> Result<(), OutputError> {
    fs::write(path, report_text(entries))?;
    Ok(())
}

/// One row per τ. Failed runs leave every column after `tau` empty.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut s = String::new();
    s.push_str(SWEEP_HEADER);
    s.push('\n');
    for e in &result.entries {
        match &e.outcome {
            Ok(r) => {
                let first = r
                    .dissipation
                    .first_violation_step
                    .map(|k| k.to_string())
                    .unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    fmt_f64(e.tau),
                    r.dissipation.violated(),
                    first,
                    r.max_principle.violated(),
                    fmt_f64(r.final_energy)
                );
            }
            Err(_) => {
                let _ = writeln!(s, "{},,,,", fmt_f64(e.tau));
            }
        }
    }
    s
}

pub fn write_sweep(path: &Path, result: &SweepResult) -> Result<(), OutputError> {
    fs::write(path, sweep_csv(result))?;
    Ok(())
}
