//! Piecewise modal solution container and measurement utilities.

use serde::{Deserialize, Serialize};

use super::basis::{eval_modal, eval_modal_deriv, project_function};
use super::quadrature::QuadratureRule;

/// Extra quadrature points used whenever the integrand is not a polynomial
/// (error norms, absolute differences).
pub const MEASURE_EXTRA_POINTS: usize = 3;

/// Extra quadrature points for data terms (manufactured forcings, projected
/// initial conditions): steep benchmark data must be integrated to round-off
/// or right-hand-side noise masks the Galerkin behavior of the schemes.
pub const DATA_QUAD_EXTRA: usize = 9;

/// Piecewise polynomial of fixed degree on an active-cell partition.
///
/// `cells` is the interval list in spatial order; `coeffs[i]` holds the
/// `p_order + 1` Legendre modal coefficients of cell `i` on [-1, 1].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DGSolution {
    pub cells: Vec<(f64, f64)>,
    pub p_order: usize,
    pub coeffs: Vec<Vec<f64>>,
}

/// Per-cell boundary jump magnitudes plus their mesh mean.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpReport {
    /// Sum of the trace mismatches at the cell's endpoints (zero contribution
    /// at domain boundaries).
    pub per_cell: Vec<f64>,
    /// Jump magnitude at each interior interface, left to right.
    pub interfaces: Vec<f64>,
    pub mean: f64,
}

/// Degree-of-freedom tally; trace unknowns only exist for condensed solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DofCount {
    pub element: usize,
    pub trace: Option<usize>,
}

impl DofCount {
    pub fn total(&self) -> usize {
        self.element + self.trace.unwrap_or(0)
    }
}

impl DGSolution {
    pub fn zero(cells: Vec<(f64, f64)>, p_order: usize) -> Self {
        let coeffs = vec![vec![0.0; p_order + 1]; cells.len()];
        Self { cells, p_order, coeffs }
    }

    /// Cell-wise L2 projection of `f` onto the partition, integrated with
    /// the data rule (projected fields are rarely polynomials).
    pub fn project(cells: Vec<(f64, f64)>, p_order: usize, f: &dyn Fn(f64) -> f64) -> Self {
        let quad = QuadratureRule::gauss_legendre(p_order + 1 + DATA_QUAD_EXTRA);
        let coeffs = cells
            .iter()
            .map(|&(a, b)| project_function(&mut |x| f(x), a, b, p_order, &quad))
            .collect();
        Self { cells, p_order, coeffs }
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.cells[i].1 - self.cells[i].0
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        0.5 * (self.cells[i].0 + self.cells[i].1)
    }

    /// Map physical `x` in cell `i` to the reference coordinate.
    fn to_ref(&self, i: usize, x: f64) -> f64 {
        let (a, b) = self.cells[i];
        (2.0 * x - a - b) / (b - a)
    }

    pub fn eval_in_cell(&self, i: usize, x: f64) -> f64 {
        eval_modal(&self.coeffs[i], self.to_ref(i, x))
    }

    /// Physical-space derivative inside cell `i`.
    pub fn deriv_in_cell(&self, i: usize, x: f64) -> f64 {
        eval_modal_deriv(&self.coeffs[i], self.to_ref(i, x)) * 2.0 / self.width(i)
    }

    /// Value at `x`, attributed to the cell whose interval contains it
    /// (interface points resolve to the right cell, domain end to the last).
    pub fn eval(&self, x: f64) -> f64 {
        let i = self
            .cells
            .partition_point(|&(_, b)| b <= x)
            .min(self.cells.len() - 1);
        self.eval_in_cell(i, x)
    }

    /// Trace value at the left endpoint of cell `i`.
    pub fn trace_left(&self, i: usize) -> f64 {
        eval_modal(&self.coeffs[i], -1.0)
    }

    /// Trace value at the right endpoint of cell `i`.
    pub fn trace_right(&self, i: usize) -> f64 {
        eval_modal(&self.coeffs[i], 1.0)
    }

    /// Interface jump magnitudes: per cell, the two-endpoint sum of trace
    /// mismatches `|u^- - u^+|`, plus the mesh mean over active cells.
    pub fn interface_jumps(&self) -> JumpReport {
        let n = self.n_cells();
        let interfaces: Vec<f64> = (0..n.saturating_sub(1))
            .map(|i| (self.trace_right(i) - self.trace_left(i + 1)).abs())
            .collect();
        let per_cell: Vec<f64> = (0..n)
            .map(|i| {
                let left = if i > 0 { interfaces[i - 1] } else { 0.0 };
                let right = if i < n - 1 { interfaces[i] } else { 0.0 };
                left + right
            })
            .collect();
        let mean = per_cell.iter().sum::<f64>() / n as f64;
        JumpReport { per_cell, interfaces, mean }
    }

    /// Quadrature L2 norm of `u_h - exact`, with extra points so the
    /// measurement is not limited by integration error.
    pub fn l2_error(&self, exact: &dyn Fn(f64) -> f64) -> f64 {
        let quad = QuadratureRule::gauss_legendre(self.p_order + 1 + MEASURE_EXTRA_POINTS);
        let mut total = 0.0;
        for i in 0..self.n_cells() {
            let (a, b) = self.cells[i];
            total += quad.integrate_on(a, b, |x| {
                let d = self.eval_in_cell(i, x) - exact(x);
                d * d
            });
        }
        total.sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_error(&|_| 0.0)
    }

    /// Exact integral of the expansion over the domain: only the mean mode
    /// carries mass, so this is a closed-form sum.
    pub fn mass(&self) -> f64 {
        (0..self.n_cells()).map(|i| self.coeffs[i][0] * self.width(i)).sum()
    }

    pub fn dof_count(&self) -> DofCount {
        DofCount { element: self.n_cells() * (self.p_order + 1), trace: None }
    }
}
