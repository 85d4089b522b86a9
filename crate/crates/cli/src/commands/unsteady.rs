//! `unsteady`: one AMR cycle per time step, then advance the solution.

use std::path::{Path, PathBuf};

use amrbench_core::env::{deploy_cycle, DeployOptions};
use amrbench_core::fem::{step_unsteady_advection, transfer};
use amrbench_core::indicators::{
    execute_marks, gradient_indicator, kelly_indicator, mark, IndicatorKind, KellyContext,
    MarkingStrategy,
};
use amrbench_core::mesh::TreeMesh1D;

use crate::cases::ExperimentCase;
use crate::report::{write_solution, CsvFile, SolutionFile, UnsteadyRow, UNSTEADY_CSV_HEADER};
use crate::CliError;

use super::deploy::{dofs_for, load_policy};
use super::ensure_out_dir;

pub enum UnsteadyDriver {
    /// Trained policy with an optional cost-weight override.
    Policy { model: PathBuf, cost_weight: Option<f64> },
    /// Classical indicator plus marking strategy. The heuristic loop is
    /// budget-free; only the stability level cap restrains it.
    Heuristic { indicator: IndicatorKind, strategy: MarkingStrategy },
}

/// Deepest refinement level that keeps the fixed time step inside the
/// explicit stability bound `dt <= h_min / (|c| (2p + 1))`.
pub fn stability_level_cap(h_root: f64, dt: f64, speed: f64, p_order: usize) -> u32 {
    let mut level = 0u32;
    let mut h = h_root;
    let limit = dt * speed.abs() * (2 * p_order + 1) as f64;
    while h / 2.0 >= limit && level < 40 {
        h /= 2.0;
        level += 1;
    }
    level
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_unsteady(
    case: &ExperimentCase,
    driver: &UnsteadyDriver,
    budget: usize,
    t_final: f64,
    p_order: Option<usize>,
    seed: u64,
    out_dir: &Path,
) -> Result<Vec<UnsteadyRow>, CliError> {
    if !case.is_unsteady() {
        return Err(CliError::Config("static cases run through deploy/baseline".into()));
    }
    if t_final < 0.0 {
        return Err(CliError::Config("final time must be non-negative".into()));
    }
    let p_order = p_order.unwrap_or(case.default_p_order());
    let dt = case.dt();
    let n_steps = (t_final / dt).round() as usize;
    let problem = case.env_problem();
    let advection = case.advection_problem().expect("unsteady case is advective");

    let n_roots = case.default_n_roots();
    let domain = case.domain();
    let h_root = (domain.1 - domain.0) / n_roots as f64;
    let level_cap = stability_level_cap(h_root, dt, advection.speed, p_order);

    let loaded = match driver {
        UnsteadyDriver::Policy { model, cost_weight } => {
            Some(load_policy(model, budget, *cost_weight)?)
        }
        UnsteadyDriver::Heuristic { strategy, .. } => {
            strategy.validate().map_err(|e| CliError::Config(e.to_string()))?;
            None
        }
    };

    let mut mesh = TreeMesh1D::new(domain, n_roots, budget);
    let mut u = problem.initial_solution(&mesh, p_order)?;
    let mut time = 0.0;

    let row_at = |step: usize,
                  time: f64,
                  mesh: &TreeMesh1D,
                  u: &amrbench_core::fem::DGSolution,
                  actions: (usize, usize, usize)| {
        let exact = case.exact_at(time);
        UnsteadyRow {
            step,
            time,
            cells: mesh.active_count(),
            dofs: dofs_for(case, mesh.active_count(), p_order),
            l2_error: u.l2_error(&|x| exact(x)),
            n_refine: actions.0,
            n_coarsen: actions.1,
            n_nothing: actions.2,
        }
    };

    let mut rows = Vec::with_capacity(n_steps + 1);
    rows.push(row_at(0, 0.0, &mesh, &u, (0, 0, 0)));

    for step in 1..=n_steps {
        // One marking cycle on the current solution.
        let actions = match (&loaded, driver) {
            (Some(loaded), _) => {
                let opts = DeployOptions {
                    max_level: Some(level_cap),
                    features: loaded.features,
                };
                let (next, log) =
                    deploy_cycle(&problem, &mut mesh, &u, loaded.policy.as_ref(), &opts)?;
                u = next;
                (log.refined(), log.coarsened(), log.nothing())
            }
            (None, UnsteadyDriver::Heuristic { indicator, strategy }) => {
                let scores = match indicator {
                    IndicatorKind::GradientBased => gradient_indicator(&u),
                    IndicatorKind::Kelly => kelly_indicator(&u, &KellyContext::advection()),
                };
                let (refine, coarsen) =
                    mark(&scores, *strategy).map_err(|e| CliError::Config(e.to_string()))?;
                let counts = execute_marks(&mut mesh, &refine, &coarsen, Some(level_cap));
                u = transfer(&u, &mesh.active_intervals())?;
                (counts.refined, counts.coarsened, counts.unchanged)
            }
            (None, UnsteadyDriver::Policy { .. }) => unreachable!(),
        };

        // Advance the solution one time step on the adapted mesh.
        u = step_unsteady_advection(&advection, &u, time, dt)
            .map_err(|e| CliError::Runtime(format!("advancing past step {step}: {e}")))?;
        time = step as f64 * dt;
        rows.push(row_at(step, time, &mesh, &u, actions));
    }

    ensure_out_dir(out_dir)?;
    let driver_name = match driver {
        UnsteadyDriver::Policy { .. } => "policy".to_string(),
        UnsteadyDriver::Heuristic { indicator, strategy } => {
            let ind = match indicator {
                IndicatorKind::Kelly => "kelly",
                IndicatorKind::GradientBased => "gradient",
            };
            let s = match strategy {
                MarkingStrategy::Bulk { refine_frac, coarsen_frac } => {
                    format!("bulk:{refine_frac}:{coarsen_frac}")
                }
                MarkingStrategy::FixedFraction { refine_frac, coarsen_frac } => {
                    format!("fixed:{refine_frac}:{coarsen_frac}")
                }
            };
            format!("{ind} {s}")
        }
    };
    let mut csv = CsvFile::new(
        UNSTEADY_CSV_HEADER,
        &[
            ("schema", "unsteady.v1".into()),
            ("command", "unsteady".into()),
            ("case", case.name().into()),
            ("driver", driver_name),
            ("budget", budget.to_string()),
            ("t_final", t_final.to_string()),
            ("dt", dt.to_string()),
            ("level_cap", level_cap.to_string()),
            ("seed", seed.to_string()),
        ],
    );
    for row in &rows {
        csv.push_unsteady(row);
    }
    csv.write(&out_dir.join("unsteady_timeseries.csv"))?;
    write_solution(
        &out_dir.join("final_solution.json"),
        &SolutionFile { mesh: mesh.snapshot(), dofs: u.dof_count(), solution: u },
    )?;
    Ok(rows)
}
