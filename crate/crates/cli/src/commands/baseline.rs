//! `baseline`: classical indicator-driven refinement cycles.

use std::path::Path;

use amrbench_core::indicators::{heuristic_cycle, IndicatorKind, MarkingStrategy};
use amrbench_core::mesh::TreeMesh1D;

use crate::cases::ExperimentCase;
use crate::report::{write_solution, CsvFile, CycleRow, SolutionFile, CYCLE_CSV_HEADER};
use crate::CliError;

use super::deploy::dofs_for;
use super::ensure_out_dir;

#[allow(clippy::too_many_arguments)]
pub fn cmd_baseline(
    case: &ExperimentCase,
    indicator: IndicatorKind,
    strategy: MarkingStrategy,
    cycles: usize,
    p_order: Option<usize>,
    budget: Option<usize>,
    max_level: Option<u32>,
    out_dir: &Path,
) -> Result<Vec<CycleRow>, CliError> {
    strategy.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let p_order = p_order.unwrap_or(case.default_p_order());
    let problem = case.steady_problem(p_order)?;
    let exact = case.exact_at(0.0);

    // The heuristic loop itself is budget-free; the cap only scales the
    // usage column of the mesh snapshot.
    let max_cells = budget.unwrap_or(1_000_000);
    let mut mesh = TreeMesh1D::new(case.domain(), case.default_n_roots(), max_cells);
    let mut u = problem.solve(&mesh)?;

    let mut rows = Vec::with_capacity(cycles + 1);
    rows.push(CycleRow {
        cycle: 0,
        cells: mesh.active_count(),
        dofs: dofs_for(case, mesh.active_count(), p_order),
        l2_error: u.l2_error(&|x| exact(x)),
        n_refine: 0,
        n_coarsen: 0,
        n_nothing: 0,
    });
    for cycle in 1..=cycles {
        let (next, counts) = heuristic_cycle(&problem, &mut mesh, &u, indicator, strategy, max_level)?;
        u = next;
        rows.push(CycleRow {
            cycle,
            cells: mesh.active_count(),
            dofs: dofs_for(case, mesh.active_count(), p_order),
            l2_error: u.l2_error(&|x| exact(x)),
            n_refine: counts.refined,
            n_coarsen: counts.coarsened,
            n_nothing: counts.unchanged,
        });
    }

    ensure_out_dir(out_dir)?;
    let indicator_name = match indicator {
        IndicatorKind::Kelly => "kelly",
        IndicatorKind::GradientBased => "gradient",
    };
    let strategy_name = match strategy {
        MarkingStrategy::Bulk { refine_frac, coarsen_frac } => {
            format!("bulk:{refine_frac}:{coarsen_frac}")
        }
        MarkingStrategy::FixedFraction { refine_frac, coarsen_frac } => {
            format!("fixed:{refine_frac}:{coarsen_frac}")
        }
    };
    let mut csv = CsvFile::new(
        CYCLE_CSV_HEADER,
        &[
            ("schema", "cycle.v1".into()),
            ("command", "baseline".into()),
            ("case", case.name().into()),
            ("indicator", indicator_name.into()),
            ("strategy", strategy_name),
            ("p_order", p_order.to_string()),
        ],
    );
    for row in &rows {
        csv.push_cycle(row);
    }
    csv.write(&out_dir.join("baseline_cycles.csv"))?;
    write_solution(
        &out_dir.join("final_solution.json"),
        &SolutionFile { mesh: mesh.snapshot(), dofs: u.dof_count(), solution: u },
    )?;
    Ok(rows)
}
