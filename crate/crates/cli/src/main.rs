use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use amrbench_cli::cases::ExperimentCase;
use amrbench_cli::commands::{
    cmd_baseline, cmd_convergence, cmd_deploy, cmd_introspect, cmd_train, cmd_unsteady,
    DeployArgs, IntrospectArgs, UnsteadyDriver,
};
use amrbench_cli::CliError;

/// 1D adaptive-mesh-refinement workbench: train refinement policies, deploy
/// them, and benchmark against classical error-indicator heuristics.
#[derive(Parser)]
#[command(name = "amrbench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a refinement policy from a JSON configuration file.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Also write a JSONL trace of every environment step.
        #[arg(long)]
        trace_episodes: bool,
    },
    /// Run refinement cycles with a trained policy on a static case.
    Deploy {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        case: String,
        /// Oscillation count for the generalization case.
        #[arg(long)]
        sin_modes: Option<u32>,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 6)]
        cycles: usize,
        #[arg(long)]
        porder: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cost weight for split-mode (tunable) models.
        #[arg(long)]
        cost_weight: Option<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run refinement cycles with a classical indicator heuristic.
    Baseline {
        #[arg(long)]
        case: String,
        #[arg(long)]
        sin_modes: Option<u32>,
        /// 'kelly' or 'gradient'.
        #[arg(long)]
        indicator: String,
        /// `bulk:<r>:<c>` or `fixed:<r>:<c>`.
        #[arg(long)]
        strategy: String,
        #[arg(long, default_value_t = 6)]
        cycles: usize,
        #[arg(long)]
        porder: Option<usize>,
        #[arg(long)]
        budget: Option<usize>,
        /// Optional refinement depth cap in tree levels.
        #[arg(long)]
        max_level: Option<u32>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Uniform-refinement convergence study.
    Convergence {
        #[arg(long)]
        case: String,
        #[arg(long)]
        sin_modes: Option<u32>,
        #[arg(long)]
        porder: Option<usize>,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        /// Cells on the coarsest level.
        #[arg(long)]
        n0: Option<usize>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Time-dependent run: one AMR cycle per time step.
    Unsteady {
        #[arg(long)]
        case: String,
        /// Trained model file (mutually exclusive with --indicator).
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        cost_weight: Option<f64>,
        #[arg(long)]
        indicator: Option<String>,
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 7.0)]
        t_final: f64,
        #[arg(long)]
        porder: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Action map of a trained model over a log-jump grid.
    Introspect {
        #[arg(long)]
        model: PathBuf,
        /// Resource fractions, comma separated.
        #[arg(long, default_value = "0.3,0.5,0.7")]
        p: String,
        #[arg(long, default_value_t = -16.0)]
        grid_min: f64,
        #[arg(long, default_value_t = -1.0)]
        grid_max: f64,
        #[arg(long, default_value_t = 40)]
        grid_points: usize,
        #[arg(long)]
        cost_weight: Option<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train { config, out_dir, trace_episodes } => {
            let outputs = cmd_train(&config, &out_dir, trace_episodes)?;
            println!(
                "trained model -> {} (best eval mean reward {:.3} at step {})",
                outputs.model_path.display(),
                outputs.log.best_eval_mean,
                outputs.log.best_step
            );
            Ok(())
        }
        Command::Deploy {
            model,
            case,
            sin_modes,
            budget,
            cycles,
            porder,
            seed,
            cost_weight,
            out_dir,
        } => {
            let case = ExperimentCase::parse(&case, sin_modes)?;
            let args = DeployArgs {
                model,
                case,
                budget,
                cycles,
                p_order: porder,
                seed,
                cost_weight,
            };
            let rows = cmd_deploy(&args, &out_dir)?;
            let last = rows.last().expect("at least the initial row");
            println!(
                "deploy: {} cycles, final cells {}, dofs {}, l2 error {:.3e}",
                cycles, last.cells, last.dofs, last.l2_error
            );
            Ok(())
        }
        Command::Baseline {
            case,
            sin_modes,
            indicator,
            strategy,
            cycles,
            porder,
            budget,
            max_level,
            out_dir,
        } => {
            let case = ExperimentCase::parse(&case, sin_modes)?;
            let indicator = indicator.parse().map_err(|e: amrbench_core::indicators::MarkError| {
                CliError::Config(e.to_string())
            })?;
            let strategy = strategy.parse().map_err(|e: amrbench_core::indicators::MarkError| {
                CliError::Config(e.to_string())
            })?;
            let rows =
                cmd_baseline(&case, indicator, strategy, cycles, porder, budget, max_level, &out_dir)?;
            let last = rows.last().expect("at least the initial row");
            println!(
                "baseline: {} cycles, final cells {}, dofs {}, l2 error {:.3e}",
                cycles, last.cells, last.dofs, last.l2_error
            );
            Ok(())
        }
        Command::Convergence { case, sin_modes, porder, levels, n0, out_dir } => {
            let case = ExperimentCase::parse(&case, sin_modes)?;
            let rows = cmd_convergence(&case, porder, levels, n0, &out_dir)?;
            for row in &rows {
                let order = row
                    .observed_order
                    .map(|o| format!("{o:.3}"))
                    .unwrap_or_else(|| "-".into());
                println!(
                    "level {}: h {:.4e}, dofs {}, l2 error {:.4e}, order {}",
                    row.level, row.h, row.dofs, row.l2_error, order
                );
            }
            Ok(())
        }
        Command::Unsteady {
            case,
            model,
            cost_weight,
            indicator,
            strategy,
            budget,
            t_final,
            porder,
            seed,
            out_dir,
        } => {
            let case = ExperimentCase::parse(&case, None)?;
            let driver = match (model, indicator, strategy) {
                (Some(model), None, None) => UnsteadyDriver::Policy { model, cost_weight },
                (None, Some(ind), Some(strat)) => UnsteadyDriver::Heuristic {
                    indicator: ind.parse().map_err(
                        |e: amrbench_core::indicators::MarkError| CliError::Config(e.to_string()),
                    )?,
                    strategy: strat.parse().map_err(
                        |e: amrbench_core::indicators::MarkError| CliError::Config(e.to_string()),
                    )?,
                },
                _ => {
                    return Err(CliError::Config(
                        "provide either --model or both --indicator and --strategy".into(),
                    ))
                }
            };
            let rows = cmd_unsteady(&case, &driver, budget, t_final, porder, seed, &out_dir)?;
            let last = rows.last().expect("at least the initial row");
            println!(
                "unsteady: {} steps to t = {:.2}, final cells {}, l2 error {:.3e}",
                rows.len() - 1,
                last.time,
                last.cells,
                last.l2_error
            );
            Ok(())
        }
        Command::Introspect {
            model,
            p,
            grid_min,
            grid_max,
            grid_points,
            cost_weight,
            out_dir,
        } => {
            let usage_values: Result<Vec<f64>, _> =
                p.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let usage_values = usage_values
                .map_err(|e| CliError::Config(format!("bad --p list '{p}': {e}")))?;
            let args = IntrospectArgs {
                model,
                usage_values,
                grid_min,
                grid_max,
                grid_points,
                cost_weight,
            };
            let rows = cmd_introspect(&args, &out_dir)?;
            println!("introspection: {} grid points written", rows.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
