//! Command implementations shared by the binary and the test suites.

mod baseline;
mod convergence;
mod deploy;
mod introspect;
mod train;
mod unsteady;

pub use baseline::cmd_baseline;
pub use convergence::{cmd_convergence, least_squares_order, uniform_study};
pub use deploy::{cmd_deploy, load_policy, DeployArgs, LoadedPolicy};
pub use introspect::{cmd_introspect, IntrospectArgs};
pub use train::{cmd_train, TrainOutputs};
pub use unsteady::{cmd_unsteady, stability_level_cap, UnsteadyDriver};

use std::path::Path;

use crate::CliError;

fn ensure_out_dir(out_dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", out_dir.display())))
}
