//! Report writing shared by every command.

use std::fs;
use std::path::Path;

use serde::Serialize;
use wavefocus::grid::{ComplexField, FarField, RealField};
use wavefocus::io;

use crate::error::CliResult;

/// Pretty JSON with a trailing newline; non-finite numbers become `null`.
pub fn to_json<S: Serialize>(report: &S) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn write_report<S: Serialize>(dir: &Path, report: &S) -> CliResult<()> {
    fs::write(dir.join("report.json"), to_json(report)?)?;
    Ok(())
}

pub fn write_complex(dir: &Path, name: &str, field: &ComplexField<f64>) -> CliResult<()> {
    Ok(io::create(dir.join(name), |w| io::write_field(w, field))?)
}

pub fn write_real(dir: &Path, name: &str, field: &RealField<f64>) -> CliResult<()> {
    Ok(io::create(dir.join(name), |w| io::write_real_field(w, field))?)
}

pub fn write_far(dir: &Path, name: &str, field: &FarField<f64>) -> CliResult<()> {
    Ok(io::create(dir.join(name), |w| io::write_far_field(w, field))?)
}

/// Grid summary included in reports.
#[derive(Debug, Serialize)]
pub struct GridSummary {
    pub shape: [usize; 3],
    pub voxels: usize,
    pub spacing: [f64; 3],
}

impl GridSummary {
    pub fn of(grid: &wavefocus::grid::DomainGrid<f64>) -> Self {
        Self { shape: grid.shape(), voxels: grid.len(), spacing: grid.spacing() }
    }
}
