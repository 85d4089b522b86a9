//! Cell-local decision environment over the AMR mesh.
//!
//! One episode walks an agent across uniformly sampled cells; each step
//! applies a coarsen / do-nothing / refine action to the visited cell,
//! re-solves, and pays out a reward that trades the induced solution change
//! against a resource barrier. Deployment sweeps a trained policy over the
//! whole mesh once per refinement cycle.

mod amr_env;
mod deploy;

pub use amr_env::{AmrEnv, EnvProblem};
pub use deploy::{deploy_cycle, CycleEntry, CycleLog, DeployOptions, ExecutedAction};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fem::FemError;

/// Additive floor for logarithmic reward and observation scaling, a stand-in
/// for machine precision.
pub const EPSILON_FLOOR: f64 = 1e-16;

/// Length of the observation prefix shared by every configuration:
/// log-jumps (self, left, right, mean) and the resource fraction.
pub const OBS_BASE_DIM: usize = 5;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("barrier undefined for resource fraction {0}")]
    DomainError(f64),
    #[error("solver failed during environment transition: {0}")]
    Solver(#[from] FemError),
    #[error("cycle aborted; mesh restored to its pre-cycle state: {0}")]
    CycleAborted(FemError),
}

/// Per-cell action space, ordered so that argmax ties resolve to the lowest
/// index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    Coarsen = 0,
    DoNothing = 1,
    Refine = 2,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::Coarsen, Action::DoNothing, Action::Refine];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Action::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Coarsen => "coarsen",
            Action::DoNothing => "do_nothing",
            Action::Refine => "refine",
        }
    }
}

/// Resource barrier shapes. All diverge as p -> 1; the hortative variant is
/// negative at low usage, nudging the agent to spend idle budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BarrierKind {
    Sqrt,
    Polynomial,
    Hortative,
}

impl BarrierKind {
    pub fn name(self) -> &'static str {
        match self {
            BarrierKind::Sqrt => "sqrt",
            BarrierKind::Polynomial => "polynomial",
            BarrierKind::Hortative => "hortative",
        }
    }
}

impl std::str::FromStr for BarrierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sqrt" => Ok(Self::Sqrt),
            "polynomial" => Ok(Self::Polynomial),
            "hortative" => Ok(Self::Hortative),
            other => Err(format!("unknown barrier '{other}'")),
        }
    }
}

/// Barrier value at resource fraction `p`.
///
/// `p >= 1` returns the +inf sentinel, which the step logic converts into the
/// budget-overrun penalty path.
pub fn barrier(p: f64, kind: BarrierKind) -> Result<f64, EnvError> {
    if p >= 1.0 {
        return Ok(f64::INFINITY);
    }
    match kind {
        BarrierKind::Sqrt => {
            if p < 0.0 {
                return Err(EnvError::DomainError(p));
            }
            Ok(p.sqrt() / (1.0 - p))
        }
        BarrierKind::Polynomial => {
            if p < 0.0 {
                return Err(EnvError::DomainError(p));
            }
            Ok(p / (1.0 - p))
        }
        BarrierKind::Hortative => {
            if p <= 0.0 {
                return Err(EnvError::DomainError(p));
            }
            Ok(p / (1.0 - p) - (1.0 / p.sqrt() - 1.0))
        }
    }
}

/// Optional physics features appended to the observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    #[default]
    None,
    /// Local advection speed (constant-velocity problems expose one value).
    AdvectionSpeed,
}

impl FeatureSet {
    pub fn len(&self) -> usize {
        match self {
            FeatureSet::None => 0,
            FeatureSet::AdvectionSpeed => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            FeatureSet::None => vec![],
            FeatureSet::AdvectionSpeed => vec!["advection_speed".to_string()],
        }
    }
}

/// Fixed-layout observation vector:
/// `[log10(J_self + eps), log10(J_left + eps), log10(J_right + eps),
///   log10(mean J + eps), p] ++ features`.
/// Missing neighbors replicate the self entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation(pub Vec<f64>);

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn log_jump_self(&self) -> f64 {
        self.0[0]
    }

    pub fn log_jump_mean(&self) -> f64 {
        self.0[3]
    }

    /// Resource fraction entry.
    pub fn usage(&self) -> f64 {
        self.0[4]
    }

    /// Assemble from raw jump magnitudes and usage.
    pub fn from_jumps(
        self_jump: f64,
        left: Option<f64>,
        right: Option<f64>,
        mean: f64,
        usage: f64,
        features: &[f64],
    ) -> Self {
        let lg = |v: f64| (v + EPSILON_FLOOR).log10();
        let mut data = vec![
            lg(self_jump),
            lg(left.unwrap_or(self_jump)),
            lg(right.unwrap_or(self_jump)),
            lg(mean),
            usage,
        ];
        data.extend_from_slice(features);
        Observation(data)
    }

    pub fn layout_labels(features: &FeatureSet) -> Vec<String> {
        let mut labels = vec![
            "log_jump_self".to_string(),
            "log_jump_left".to_string(),
            "log_jump_right".to_string(),
            "log_jump_mean".to_string(),
            "resource_fraction".to_string(),
        ];
        labels.extend(features.labels());
        labels
    }
}

/// Episode initialization: the coarse root partition, or a randomized number
/// of uniform refinements on top of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    Coarse,
    Random,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvConfig {
    /// Relative weight of the resource cost against the accuracy term.
    pub cost_weight: f64,
    pub barrier: BarrierKind,
    pub max_cells: usize,
    pub n_roots: usize,
    pub p_order: usize,
    pub episode_len: usize,
    pub overrun_penalty: f64,
    pub init: InitMode,
    /// Consecutive mesh-preserving steps before early episode termination.
    pub do_nothing_patience: usize,
    /// Chance that an unsteady problem advances one time step before the
    /// action is applied.
    pub unsteady_step_prob: f64,
    pub features: FeatureSet,
    /// Upper bound of the uniformly drawn refinement count for random
    /// episode initialization; defaults to three per root cell.
    pub random_init_depth: Option<usize>,
}

impl EnvConfig {
    pub fn new(max_cells: usize, n_roots: usize, p_order: usize) -> Self {
        Self {
            cost_weight: 25.0,
            barrier: BarrierKind::Sqrt,
            max_cells,
            n_roots,
            p_order,
            episode_len: 200,
            overrun_penalty: -1e3,
            init: InitMode::Coarse,
            do_nothing_patience: 10,
            unsteady_step_prob: 0.1,
            features: FeatureSet::None,
            random_init_depth: None,
        }
    }

    pub fn obs_dim(&self) -> usize {
        OBS_BASE_DIM + self.features.len()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.cost_weight < 0.0 {
            return Err("cost_weight must be non-negative".into());
        }
        if self.max_cells < self.n_roots {
            return Err("max_cells must be at least the initial cell count".into());
        }
        if !(0.0..=1.0).contains(&self.unsteady_step_prob) {
            return Err("unsteady_step_prob must lie in [0, 1]".into());
        }
        if self.p_order < 1 {
            return Err("p_order must be at least 1".into());
        }
        Ok(())
    }
}

/// Reward components for one executed action.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub total: f64,
    /// Signed log-scaled solution-change term as applied (+ for refine,
    /// - for coarsen, 0 for do-nothing).
    pub accuracy_term: f64,
    /// `cost_weight * (B(p_after) - B(p_before))`, subtracted from the total.
    pub cost_term: f64,
    pub delta_u_raw: f64,
    pub p_before: f64,
    pub p_after: f64,
}

impl RewardBreakdown {
    /// A mesh-preserving step: zero reward at unchanged usage.
    pub fn inert(p: f64) -> Self {
        Self {
            total: 0.0,
            accuracy_term: 0.0,
            cost_term: 0.0,
            delta_u_raw: 0.0,
            p_before: p,
            p_after: p,
        }
    }

    /// Bare total for synthetic environments (tests, tabular benchmarks).
    pub fn flat(total: f64) -> Self {
        Self {
            total,
            accuracy_term: total,
            cost_term: 0.0,
            delta_u_raw: 0.0,
            p_before: 0.0,
            p_after: 0.0,
        }
    }
}

/// Reward for an executed action.
///
/// Refine earns `+[log10(du + eps) - log10(eps)]`, coarsen its negative, and
/// both pay `cost_weight * (B(p_after) - B(p_before))`; do-nothing is 0. The
/// +inf barrier sentinel at `p >= 1` flows into the cost term; the step logic
/// replaces the total with the overrun penalty on that path.
pub fn reward(
    action: Action,
    delta_u: f64,
    p_before: f64,
    p_after: f64,
    config: &EnvConfig,
) -> RewardBreakdown {
    debug_assert!(delta_u >= 0.0, "solution change must be non-negative");
    if action == Action::DoNothing {
        return RewardBreakdown {
            total: 0.0,
            accuracy_term: 0.0,
            cost_term: 0.0,
            delta_u_raw: delta_u,
            p_before,
            p_after,
        };
    }
    let magnitude = (delta_u + EPSILON_FLOOR).log10() - EPSILON_FLOOR.log10();
    let accuracy_term = match action {
        Action::Refine => magnitude,
        Action::Coarsen => -magnitude,
        Action::DoNothing => unreachable!(),
    };
    let b_before = barrier(p_before, config.barrier).unwrap_or(f64::INFINITY);
    let b_after = barrier(p_after, config.barrier).unwrap_or(f64::INFINITY);
    let cost_term = config.cost_weight * (b_after - b_before);
    RewardBreakdown {
        total: accuracy_term - cost_term,
        accuracy_term,
        cost_term,
        delta_u_raw: delta_u,
        p_before,
        p_after,
    }
}

/// Why an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoneReason {
    BudgetOverrun,
    EpisodeLimit,
    Patience,
    SolverFailure,
}

/// One environment transition as seen by the agent.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub reward: RewardBreakdown,
    pub done: bool,
    pub done_reason: Option<DoneReason>,
    pub obs: Observation,
}

/// JSONL-serializable trace record for one step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub cell_interval: (f64, f64),
    pub action: Action,
    pub reward_total: f64,
    pub accuracy_term: f64,
    pub cost_term: f64,
    pub delta_u: f64,
    pub p_before: f64,
    pub p_after: f64,
    pub done_reason: Option<DoneReason>,
}

/// Greedy per-cell decision source used at deployment.
pub trait Policy {
    fn act(&self, obs: &Observation) -> Action;
}

/// What a training loop needs from an episodic environment.
pub trait Environment {
    fn reset(&mut self, seed: u64) -> Observation;
    fn step(&mut self, action: Action) -> StepOutcome;
    fn obs_dim(&self) -> usize;
    /// Retune the resource-cost weight (used by split-mode training); inert
    /// for environments without a cost term.
    fn set_cost_weight(&mut self, _weight: f64) {}
}
