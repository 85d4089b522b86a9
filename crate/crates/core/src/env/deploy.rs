//! Policy deployment: one refinement cycle sweeps every active cell.

use crate::fem::DGSolution;
use crate::mesh::{CoarsenOutcome, TreeMesh1D};

use super::{Action, EnvError, EnvProblem, Observation, Policy};

#[derive(Debug, Clone, Default)]
pub struct DeployOptions {
    /// Refinement cap in tree levels; used to keep explicit time stepping
    /// within its stability bound on unsteady runs.
    pub max_level: Option<u32>,
    pub features: super::FeatureSet,
}

/// What actually happened at a visited cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecutedAction {
    Refined,
    Coarsened,
    Nothing,
    /// Cell disappeared mid-cycle (sibling coarsen executed earlier).
    Skipped,
}

#[derive(Debug, Clone)]
pub struct CycleEntry {
    pub interval: (f64, f64),
    pub decided: Option<Action>,
    pub executed: ExecutedAction,
}

#[derive(Debug, Clone, Default)]
pub struct CycleLog {
    pub entries: Vec<CycleEntry>,
}

impl CycleLog {
    pub fn refined(&self) -> usize {
        self.count(ExecutedAction::Refined)
    }

    pub fn coarsened(&self) -> usize {
        self.count(ExecutedAction::Coarsened)
    }

    pub fn nothing(&self) -> usize {
        self.count(ExecutedAction::Nothing)
    }

    fn count(&self, kind: ExecutedAction) -> usize {
        self.entries.iter().filter(|e| e.executed == kind).count()
    }
}

/// One deployment cycle.
///
/// Cells are visited in descending order of their boundary jump (ties toward
/// the left). Observations reuse the pre-cycle jump statistics; only the
/// resource fraction refreshes between elements. Actions execute
/// immediately; refine recommendations are clamped to do-nothing once the
/// budget is full (or past the level cap). After the sweep the forward model
/// runs once on the new mesh.
///
/// On a solver failure the mesh is restored and the pre-cycle solution stays
/// in force; the error is reported as [`EnvError::CycleAborted`].
pub fn deploy_cycle(
    problem: &EnvProblem,
    mesh: &mut TreeMesh1D,
    u: &DGSolution,
    policy: &dyn Policy,
    opts: &DeployOptions,
) -> Result<(DGSolution, CycleLog), EnvError> {
    let backup = mesh.clone();
    let jumps = u.interface_jumps();
    let pre_cells = mesh.active_cells();
    debug_assert_eq!(pre_cells.len(), u.n_cells());

    let mut order: Vec<usize> = (0..pre_cells.len()).collect();
    order.sort_by(|&a, &b| {
        jumps.per_cell[b]
            .partial_cmp(&jumps.per_cell[a])
            .unwrap()
            .then(a.cmp(&b))
    });

    let features = problem.features(&opts.features);
    let mut log = CycleLog::default();
    for idx in order {
        let cell = &pre_cells[idx];
        if !mesh.is_active(cell.id) {
            log.entries.push(CycleEntry {
                interval: cell.interval,
                decided: None,
                executed: ExecutedAction::Skipped,
            });
            continue;
        }
        let obs = Observation::from_jumps(
            jumps.per_cell[idx],
            cell.left.map(|_| jumps.per_cell[idx - 1]),
            cell.right.map(|_| jumps.per_cell[idx + 1]),
            jumps.mean,
            mesh.resource_fraction(),
            &features,
        );
        let decided = policy.act(&obs);
        let executed = match decided {
            Action::DoNothing => ExecutedAction::Nothing,
            Action::Refine => {
                let at_budget = mesh.resource_fraction() >= 1.0;
                let at_cap = opts.max_level.is_some_and(|cap| cell.level >= cap);
                if at_budget || at_cap || mesh.refine(cell.id).is_err() {
                    ExecutedAction::Nothing
                } else {
                    ExecutedAction::Refined
                }
            }
            Action::Coarsen => match mesh.coarsen(cell.id) {
                Ok(CoarsenOutcome::Coarsened(_)) => ExecutedAction::Coarsened,
                _ => ExecutedAction::Nothing,
            },
        };
        log.entries.push(CycleEntry {
            interval: cell.interval,
            decided: Some(decided),
            executed,
        });
    }

    match problem.recompute(mesh, u) {
        Ok(next) => Ok((next, log)),
        Err(err) => {
            *mesh = backup;
            Err(EnvError::CycleAborted(err))
        }
    }
}
