//! Episodic AMR environment: reset, step, and the forward-model dispatch.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::fem::{
    delta_u, solve_poisson_hdg, solve_steady_advection, step_unsteady_advection, transfer,
    AdvectionProblem, DGSolution, FemError, JumpReport, PoissonProblem, SpaceFn,
};
use crate::mesh::{CellId, CoarsenOutcome, TreeMesh1D};

use super::{
    reward, Action, DoneReason, EnvConfig, Environment, FeatureSet, InitMode, Observation,
    RewardBreakdown, StepOutcome, StepRecord,
};

/// Forward problems the environment can drive.
#[derive(Clone)]
pub enum EnvProblem {
    SteadyAdvection { problem: AdvectionProblem, domain: (f64, f64) },
    Poisson { problem: PoissonProblem, domain: (f64, f64) },
    UnsteadyAdvection {
        problem: AdvectionProblem,
        domain: (f64, f64),
        initial: SpaceFn,
        dt: f64,
    },
}

impl std::fmt::Debug for EnvProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::SteadyAdvection { problem, domain } => f
                .debug_struct("SteadyAdvection")
                .field("problem", problem)
                .field("domain", domain)
                .finish(),
            Self::Poisson { problem, domain } => f
                .debug_struct("Poisson")
                .field("problem", problem)
                .field("domain", domain)
                .finish(),
            Self::UnsteadyAdvection { problem, domain, dt, .. } => f
                .debug_struct("UnsteadyAdvection")
                .field("problem", problem)
                .field("domain", domain)
                .field("dt", dt)
                .finish(),
        }
    }
}

impl EnvProblem {
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::SteadyAdvection { domain, .. } => *domain,
            Self::Poisson { domain, .. } => *domain,
            Self::UnsteadyAdvection { domain, .. } => *domain,
        }
    }

    pub fn is_unsteady(&self) -> bool {
        matches!(self, Self::UnsteadyAdvection { .. })
    }

    /// Solution for a fresh mesh at the start of an episode.
    pub fn initial_solution(&self, mesh: &TreeMesh1D, p_order: usize) -> Result<DGSolution, FemError> {
        match self {
            Self::SteadyAdvection { problem, .. } => solve_steady_advection(problem, mesh, p_order),
            Self::Poisson { problem, .. } => Ok(solve_poisson_hdg(problem, mesh, p_order)?.u),
            Self::UnsteadyAdvection { initial, .. } => Ok(DGSolution::project(
                mesh.active_intervals(),
                p_order,
                &|x| initial(x),
            )),
        }
    }

    /// Run the forward model for the current mesh state: steady problems
    /// re-solve, time-dependent ones carry the evolving solution over.
    pub fn recompute(
        &self,
        mesh: &TreeMesh1D,
        previous: &DGSolution,
    ) -> Result<DGSolution, FemError> {
        match self {
            Self::SteadyAdvection { problem, .. } => {
                solve_steady_advection(problem, mesh, previous.p_order)
            }
            Self::Poisson { problem, .. } => {
                Ok(solve_poisson_hdg(problem, mesh, previous.p_order)?.u)
            }
            Self::UnsteadyAdvection { .. } => transfer(previous, &mesh.active_intervals()),
        }
    }

    /// Advance an unsteady solution one time step; steady problems are inert.
    pub fn advance(&self, u: &DGSolution, time: f64) -> Result<Option<(DGSolution, f64)>, FemError> {
        match self {
            Self::UnsteadyAdvection { problem, dt, .. } => {
                let next = step_unsteady_advection(problem, u, time, *dt)?;
                Ok(Some((next, time + dt)))
            }
            _ => Ok(None),
        }
    }

    /// Feature block appended to observations.
    pub fn features(&self, set: &FeatureSet) -> Vec<f64> {
        match set {
            FeatureSet::None => vec![],
            FeatureSet::AdvectionSpeed => match self {
                Self::SteadyAdvection { problem, .. } => vec![problem.speed],
                Self::UnsteadyAdvection { problem, .. } => vec![problem.speed],
                Self::Poisson { .. } => vec![0.0],
            },
        }
    }
}

/// Episodic environment instance. One logical thread mutates it at a time;
/// independent instances share nothing.
pub struct AmrEnv {
    problem: EnvProblem,
    config: EnvConfig,
    rng: ChaCha12Rng,
    mesh: TreeMesh1D,
    u: DGSolution,
    jumps: JumpReport,
    time: f64,
    current_cell: CellId,
    steps: usize,
    nothing_streak: usize,
    done: bool,
    last_record: Option<StepRecord>,
}

impl AmrEnv {
    pub fn new(problem: EnvProblem, config: EnvConfig, seed: u64) -> Self {
        config.validate().expect("invalid environment configuration");
        let mesh = TreeMesh1D::new(problem.domain(), config.n_roots, config.max_cells);
        let first_cell = mesh.active_cells()[0].id;
        let mut env = Self {
            mesh,
            u: DGSolution::zero(vec![problem.domain()], config.p_order),
            jumps: JumpReport { per_cell: vec![0.0], interfaces: vec![], mean: 0.0 },
            rng: ChaCha12Rng::seed_from_u64(seed),
            time: 0.0,
            current_cell: first_cell,
            steps: 0,
            nothing_streak: 0,
            done: true,
            problem,
            config,
            last_record: None,
        };
        env.reset(seed);
        env
    }

    pub fn mesh(&self) -> &TreeMesh1D {
        &self.mesh
    }

    pub fn solution(&self) -> &DGSolution {
        &self.u
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn problem(&self) -> &EnvProblem {
        &self.problem
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Trace record of the most recent step, for JSONL episode logs.
    pub fn last_record(&self) -> Option<&StepRecord> {
        self.last_record.as_ref()
    }

    fn sample_cell(&mut self) -> CellId {
        let cells = self.mesh.active_cells();
        let idx = self.rng.random_range(0..cells.len());
        cells[idx].id
    }

    /// Observation for an active cell: pre-computed jump statistics plus the
    /// current resource fraction.
    pub fn observe_cell(&self, cell: CellId) -> Observation {
        let cells = self.mesh.active_cells();
        let idx = cells
            .iter()
            .position(|c| c.id == cell)
            .expect("observed cell must be active");
        let per_cell = &self.jumps.per_cell;
        let left = cells[idx].left.map(|_| per_cell[idx - 1]);
        let right = cells[idx].right.map(|_| per_cell[idx + 1]);
        let features = self.problem.features(&self.config.features);
        Observation::from_jumps(
            per_cell[idx],
            left,
            right,
            self.jumps.mean,
            self.mesh.resource_fraction(),
            &features,
        )
    }

    fn terminal_failure(&mut self, interval: (f64, f64), action: Action) -> StepOutcome {
        let p = self.mesh.resource_fraction();
        let mut breakdown = RewardBreakdown::inert(p);
        breakdown.total = self.config.overrun_penalty;
        self.done = true;
        self.steps += 1;
        let obs = self.observe_cell(self.current_cell);
        self.record(interval, action, &breakdown, Some(DoneReason::SolverFailure));
        StepOutcome {
            reward: breakdown,
            done: true,
            done_reason: Some(DoneReason::SolverFailure),
            obs,
        }
    }

    fn record(
        &mut self,
        interval: (f64, f64),
        action: Action,
        reward: &RewardBreakdown,
        done_reason: Option<DoneReason>,
    ) {
        self.last_record = Some(StepRecord {
            step: self.steps,
            cell_interval: interval,
            action,
            reward_total: reward.total,
            accuracy_term: reward.accuracy_term,
            cost_term: reward.cost_term,
            delta_u: reward.delta_u_raw,
            p_before: reward.p_before,
            p_after: reward.p_after,
            done_reason,
        });
    }
}

impl Environment for AmrEnv {
    /// Start a new episode. Coarse init is the root partition; random init
    /// applies a uniformly drawn number of uniform single-cell refinements,
    /// capped so the starting usage stays at or below 0.9.
    fn reset(&mut self, seed: u64) -> Observation {
        self.rng = ChaCha12Rng::seed_from_u64(seed);
        self.mesh = TreeMesh1D::new(
            self.problem.domain(),
            self.config.n_roots,
            self.config.max_cells,
        );
        if self.config.init == InitMode::Random {
            let k_max = self.config.random_init_depth.unwrap_or(3 * self.config.n_roots);
            let k = self.rng.random_range(0..=k_max);
            for _ in 0..k {
                let next_usage =
                    (self.mesh.active_count() + 1) as f64 / self.config.max_cells as f64;
                if next_usage > 0.9 {
                    break;
                }
                let id = self.sample_cell();
                if self.mesh.refine(id).is_err() {
                    break;
                }
            }
        }
        self.time = 0.0;
        self.u = self
            .problem
            .initial_solution(&self.mesh, self.config.p_order)
            .expect("initial solve must succeed on the starting mesh");
        self.jumps = self.u.interface_jumps();
        self.steps = 0;
        self.nothing_streak = 0;
        self.done = false;
        self.last_record = None;
        self.current_cell = self.sample_cell();
        self.observe_cell(self.current_cell)
    }

    fn step(&mut self, action: Action) -> StepOutcome {
        assert!(!self.done, "step called on a finished episode");
        let interval = self
            .mesh
            .node(self.current_cell)
            .expect("current cell is alive")
            .interval;

        // Time-dependent problems may advance before the action lands.
        if self.problem.is_unsteady() {
            let roll: f64 = self.rng.random();
            if roll < self.config.unsteady_step_prob {
                match self.problem.advance(&self.u, self.time) {
                    Ok(Some((next, t))) => {
                        self.u = next;
                        self.time = t;
                        self.jumps = self.u.interface_jumps();
                    }
                    Ok(None) => {}
                    Err(_) => return self.terminal_failure(interval, action),
                }
            }
        }

        let p_before = self.mesh.resource_fraction();
        let mut changed = false;
        match action {
            Action::DoNothing => {}
            Action::Refine => match self.mesh.refine(self.current_cell) {
                Ok(_) => changed = true,
                Err(_) => return self.terminal_failure(interval, action),
            },
            Action::Coarsen => match self.mesh.coarsen(self.current_cell) {
                Ok(CoarsenOutcome::Coarsened(_)) => changed = true,
                Ok(CoarsenOutcome::Infeasible) => {}
                Err(_) => return self.terminal_failure(interval, action),
            },
        }

        let breakdown = if changed {
            let previous = std::mem::replace(
                &mut self.u,
                DGSolution::zero(vec![self.problem.domain()], self.config.p_order),
            );
            let next = match self.problem.recompute(&self.mesh, &previous) {
                Ok(next) => next,
                Err(_) => return self.terminal_failure(interval, action),
            };
            let du = match delta_u(&previous, &next) {
                Ok(du) => du,
                Err(_) => return self.terminal_failure(interval, action),
            };
            self.u = next;
            self.jumps = self.u.interface_jumps();
            let p_after = self.mesh.resource_fraction();
            reward(action, du, p_before, p_after, &self.config)
        } else {
            RewardBreakdown::inert(p_before)
        };

        self.steps += 1;
        if changed {
            self.nothing_streak = 0;
        } else {
            self.nothing_streak += 1;
        }

        let mut breakdown = breakdown;
        let mut done_reason = None;
        if breakdown.p_after >= 1.0 {
            breakdown.total = self.config.overrun_penalty;
            done_reason = Some(DoneReason::BudgetOverrun);
        } else if self.steps >= self.config.episode_len {
            done_reason = Some(DoneReason::EpisodeLimit);
        } else if self.nothing_streak >= self.config.do_nothing_patience {
            done_reason = Some(DoneReason::Patience);
        }
        self.done = done_reason.is_some();

        self.current_cell = self.sample_cell();
        let obs = self.observe_cell(self.current_cell);
        self.record(interval, action, &breakdown, done_reason);
        StepOutcome { reward: breakdown, done: self.done, done_reason, obs }
    }

    fn obs_dim(&self) -> usize {
        self.config.obs_dim()
    }

    fn set_cost_weight(&mut self, weight: f64) {
        self.config.cost_weight = weight;
    }
}
