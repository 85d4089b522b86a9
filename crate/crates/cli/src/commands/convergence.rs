//! `convergence`: uniform-refinement accuracy study.

use std::path::Path;

use amrbench_core::indicators::SteadyProblem;
use amrbench_core::mesh::TreeMesh1D;

use crate::cases::ExperimentCase;
use crate::report::{ConvergenceRow, CsvFile, CONVERGENCE_CSV_HEADER};
use crate::CliError;

use super::ensure_out_dir;

/// Solve on `levels` uniformly refined meshes (doubling from `n0` cells) and
/// report per-level errors and successive observed orders.
pub fn uniform_study(
    problem: &SteadyProblem,
    domain: (f64, f64),
    exact: &dyn Fn(f64) -> f64,
    trace_dofs: bool,
    levels: usize,
    n0: usize,
) -> Result<Vec<ConvergenceRow>, CliError> {
    assert!(levels >= 1 && n0 >= 1);
    let p_order = match problem {
        SteadyProblem::Advection(_, p) | SteadyProblem::Poisson(_, p) => *p,
    };
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels);
    for level in 0..levels {
        let n = n0 << level;
        let mesh = TreeMesh1D::new(domain, n, usize::MAX / 2);
        let u = problem.solve(&mesh)?;
        let h = (domain.1 - domain.0) / n as f64;
        let err = u.l2_error(exact);
        let order = rows.last().map(|prev: &ConvergenceRow| {
            (prev.l2_error / err).ln() / (prev.h / h).ln()
        });
        let dofs = n * (p_order + 1) + if trace_dofs { n + 1 } else { 0 };
        rows.push(ConvergenceRow { level, h, dofs, l2_error: err, observed_order: order });
    }
    Ok(rows)
}

/// Least-squares slope of ln(error) vs ln(h) over the last `window` rows.
pub fn least_squares_order(rows: &[ConvergenceRow], window: usize) -> f64 {
    assert!(window >= 2 && rows.len() >= window);
    let tail = &rows[rows.len() - window..];
    let xs: Vec<f64> = tail.iter().map(|r| r.h.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|r| r.l2_error.ln()).collect();
    let mx = xs.iter().sum::<f64>() / window as f64;
    let my = ys.iter().sum::<f64>() / window as f64;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

pub fn cmd_convergence(
    case: &ExperimentCase,
    p_order: Option<usize>,
    levels: usize,
    n0: Option<usize>,
    out_dir: &Path,
) -> Result<Vec<ConvergenceRow>, CliError> {
    let p_order = p_order.unwrap_or(case.default_p_order());
    let problem = case.steady_problem(p_order)?;
    let exact = case.exact_at(0.0);
    let n0 = n0.unwrap_or(case.default_n_roots());
    let trace_dofs = matches!(case, ExperimentCase::PoissonHdg);
    let rows = uniform_study(&problem, case.domain(), &|x| exact(x), trace_dofs, levels, n0)?;

    ensure_out_dir(out_dir)?;
    let mut csv = CsvFile::new(
        CONVERGENCE_CSV_HEADER,
        &[
            ("schema", "convergence.v1".into()),
            ("command", "convergence".into()),
            ("case", case.name().into()),
            ("p_order", p_order.to_string()),
            ("n0", n0.to_string()),
        ],
    );
    for row in &rows {
        csv.push_convergence(row);
    }
    csv.write(&out_dir.join("convergence.csv"))?;
    Ok(rows)
}
