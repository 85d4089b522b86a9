//! CSV and JSONL emission. Schemas are versioned through their header lines;
//! metadata rows are '#'-prefixed and carry no timestamps, so repeated seeded
//! runs produce byte-identical files.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use amrbench_core::fem::{DGSolution, DofCount};
use amrbench_core::mesh::MeshSnapshot;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CYCLE_CSV_HEADER: &str = "cycle,cells,dofs,l2_error,n_refine,n_coarsen,n_nothing";
pub const CONVERGENCE_CSV_HEADER: &str = "level,h,dofs,l2_error,observed_order";
pub const UNSTEADY_CSV_HEADER: &str = "step,time,cells,dofs,l2_error,n_refine,n_coarsen,n_nothing";
pub const INTROSPECT_CSV_HEADER: &str = "p,log_jump_self,log_jump_mean,action_index,action";

/// Full-precision, locale-free float field.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.12e}")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleRow {
    pub cycle: usize,
    pub cells: usize,
    pub dofs: usize,
    pub l2_error: f64,
    pub n_refine: usize,
    pub n_coarsen: usize,
    pub n_nothing: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub dofs: usize,
    pub l2_error: f64,
    /// Slope against the previous level; absent on the first row.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnsteadyRow {
    pub step: usize,
    pub time: f64,
    pub cells: usize,
    pub dofs: usize,
    pub l2_error: f64,
    pub n_refine: usize,
    pub n_coarsen: usize,
    pub n_nothing: usize,
}

pub struct CsvFile {
    lines: Vec<String>,
}

impl CsvFile {
    pub fn new(header: &str, metadata: &[(&str, String)]) -> Self {
        let mut lines = Vec::new();
        for (key, value) in metadata {
            lines.push(format!("# {key}={value}"));
        }
        lines.push(header.to_string());
        Self { lines }
    }

    pub fn push_cycle(&mut self, row: &CycleRow) {
        self.lines.push(format!(
            "{},{},{},{},{},{},{}",
            row.cycle,
            row.cells,
            row.dofs,
            fmt_float(row.l2_error),
            row.n_refine,
            row.n_coarsen,
            row.n_nothing
        ));
    }

    pub fn push_convergence(&mut self, row: &ConvergenceRow) {
        let order = row.observed_order.map(fmt_float).unwrap_or_default();
        self.lines.push(format!(
            "{},{},{},{},{}",
            row.level,
            fmt_float(row.h),
            row.dofs,
            fmt_float(row.l2_error),
            order
        ));
    }

    pub fn push_unsteady(&mut self, row: &UnsteadyRow) {
        self.lines.push(format!(
            "{},{},{},{},{},{},{},{}",
            row.step,
            fmt_float(row.time),
            row.cells,
            row.dofs,
            fmt_float(row.l2_error),
            row.n_refine,
            row.n_coarsen,
            row.n_nothing
        ));
    }

    pub fn push_introspect(&mut self, p: f64, log_self: f64, log_mean: f64, action_index: usize, action: &str) {
        self.lines.push(format!(
            "{},{},{},{},{}",
            fmt_float(p),
            fmt_float(log_self),
            fmt_float(log_mean),
            action_index,
            action
        ));
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = String::new();
        for line in &self.lines {
            writeln!(&mut text, "{line}").expect("string write");
        }
        std::fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
    }
}

/// Append serde rows as JSON lines.
pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", path.display())))?;
    let mut out = std::io::BufWriter::new(file);
    for row in rows {
        let line = serde_json::to_string(row)
            .map_err(|e| CliError::Runtime(format!("serializing log row: {e}")))?;
        writeln!(out, "{line}")
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
    }
    Ok(())
}

/// Final solution artifact: mesh snapshot plus the modal expansion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionFile {
    pub mesh: MeshSnapshot,
    pub solution: DGSolution,
    pub dofs: DofCount,
}

pub fn write_solution(path: &Path, file: &SolutionFile) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(file)
        .map_err(|e| CliError::Runtime(format!("serializing solution: {e}")))?;
    std::fs::write(path, json)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
}
