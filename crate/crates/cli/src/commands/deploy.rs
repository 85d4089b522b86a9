//! `deploy`: sweep a trained policy over refinement cycles on a case.

use std::path::{Path, PathBuf};

use amrbench_core::env::{deploy_cycle, DeployOptions, FeatureSet, Policy};
use amrbench_core::mesh::TreeMesh1D;
use amrbench_core::rl::{load_model, GreedyPolicy, KnownCostParams, ModelMeta, TunablePolicy};

use crate::cases::ExperimentCase;
use crate::report::{
    write_solution, CsvFile, CycleRow, SolutionFile, CYCLE_CSV_HEADER,
};
use crate::CliError;

use super::ensure_out_dir;

pub struct DeployArgs {
    pub model: PathBuf,
    pub case: ExperimentCase,
    pub budget: usize,
    pub cycles: usize,
    pub p_order: Option<usize>,
    pub seed: u64,
    /// Override of the cost weight for split-mode (tunable) models.
    pub cost_weight: Option<f64>,
}

pub struct LoadedPolicy {
    pub policy: Box<dyn Policy>,
    pub meta: ModelMeta,
    pub features: FeatureSet,
}

/// Load a model file and build the deployment policy, refusing layout
/// mismatches before any solve happens.
pub fn load_policy(
    model_path: &Path,
    budget: usize,
    cost_weight: Option<f64>,
) -> Result<LoadedPolicy, CliError> {
    let (net, meta) = load_model(model_path)?;
    let features = match meta.obs_layout.len() {
        5 => FeatureSet::None,
        6 if meta.obs_layout.last().map(String::as_str) == Some("advection_speed") => {
            FeatureSet::AdvectionSpeed
        }
        _ => {
            return Err(CliError::Config(format!(
                "unsupported observation layout {:?}",
                meta.obs_layout
            )))
        }
    };
    if meta.obs_dim != 5 + features.len() {
        return Err(CliError::Config(format!(
            "model obs_dim {} does not match its layout {:?}",
            meta.obs_dim, meta.obs_layout
        )));
    }
    let policy: Box<dyn Policy> = if meta.split_mode {
        let barrier = meta
            .barrier
            .parse()
            .map_err(|e: String| CliError::Config(format!("model barrier: {e}")))?;
        TunablePolicy {
            learned: net,
            known: KnownCostParams { barrier, max_cells: budget },
            cost_weight: cost_weight.unwrap_or(meta.cost_weight),
        }
        .into_boxed()
    } else {
        if cost_weight.is_some() {
            return Err(CliError::Config(
                "cost-weight overrides apply only to split-mode models".into(),
            ));
        }
        Box::new(GreedyPolicy(net))
    };
    Ok(LoadedPolicy { policy, meta, features })
}

trait IntoBoxedPolicy {
    fn into_boxed(self) -> Box<dyn Policy>;
}

impl IntoBoxedPolicy for TunablePolicy {
    fn into_boxed(self) -> Box<dyn Policy> {
        Box::new(self)
    }
}

pub fn cmd_deploy(args: &DeployArgs, out_dir: &Path) -> Result<Vec<CycleRow>, CliError> {
    if args.case.is_unsteady() {
        return Err(CliError::Config(
            "time-dependent cases deploy through the unsteady command".into(),
        ));
    }
    let p_order = args.p_order.unwrap_or(args.case.default_p_order());
    let loaded = load_policy(&args.model, args.budget, args.cost_weight)?;
    let problem = args.case.env_problem();
    let exact = args.case.exact_at(0.0);

    let mut mesh = TreeMesh1D::new(args.case.domain(), args.case.default_n_roots(), args.budget);
    let mut u = problem.initial_solution(&mesh, p_order)?;
    let opts = DeployOptions { max_level: None, features: loaded.features };

    let mut rows = Vec::with_capacity(args.cycles + 1);
    rows.push(CycleRow {
        cycle: 0,
        cells: mesh.active_count(),
        dofs: dofs_for(&args.case, mesh.active_count(), p_order),
        l2_error: u.l2_error(&|x| exact(x)),
        n_refine: 0,
        n_coarsen: 0,
        n_nothing: 0,
    });
    for cycle in 1..=args.cycles {
        let (next, log) = deploy_cycle(&problem, &mut mesh, &u, loaded.policy.as_ref(), &opts)?;
        u = next;
        debug_assert!(mesh.active_count() <= args.budget);
        rows.push(CycleRow {
            cycle,
            cells: mesh.active_count(),
            dofs: dofs_for(&args.case, mesh.active_count(), p_order),
            l2_error: u.l2_error(&|x| exact(x)),
            n_refine: log.refined(),
            n_coarsen: log.coarsened(),
            n_nothing: log.nothing(),
        });
    }

    ensure_out_dir(out_dir)?;
    let mut csv = CsvFile::new(
        CYCLE_CSV_HEADER,
        &[
            ("schema", "cycle.v1".into()),
            ("command", "deploy".into()),
            ("case", args.case.name().into()),
            ("budget", args.budget.to_string()),
            ("p_order", p_order.to_string()),
            ("seed", args.seed.to_string()),
            ("model_hash", loaded.meta.config_hash.clone()),
        ],
    );
    for row in &rows {
        csv.push_cycle(row);
    }
    csv.write(&out_dir.join("deploy_cycles.csv"))?;
    write_solution(
        &out_dir.join("final_solution.json"),
        &SolutionFile { mesh: mesh.snapshot(), dofs: u.dof_count(), solution: u },
    )?;
    Ok(rows)
}

/// CSV degree-of-freedom column: element unknowns, plus trace unknowns for
/// the condensed scheme.
pub fn dofs_for(case: &ExperimentCase, cells: usize, p_order: usize) -> usize {
    let element = cells * (p_order + 1);
    if matches!(case, ExperimentCase::PoissonHdg) {
        element + cells + 1
    } else {
        element
    }
}
