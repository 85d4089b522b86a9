//! `introspect`: map a trained policy's recommendations over a jump grid.

use std::path::{Path, PathBuf};

use amrbench_core::env::Observation;

use crate::report::{CsvFile, INTROSPECT_CSV_HEADER};
use crate::CliError;

use super::deploy::load_policy;
use super::ensure_out_dir;

pub struct IntrospectArgs {
    pub model: PathBuf,
    /// Resource fractions to sweep.
    pub usage_values: Vec<f64>,
    /// Log-jump grid bounds, both axes.
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    pub cost_weight: Option<f64>,
}

impl Default for IntrospectArgs {
    fn default() -> Self {
        Self {
            model: PathBuf::new(),
            usage_values: vec![0.3, 0.5, 0.7],
            // Jump magnitudes encountered in practice live in this log range.
            grid_min: -16.0,
            grid_max: -1.0,
            grid_points: 40,
            cost_weight: None,
        }
    }
}

/// Rows of (p, log self-jump, log mean-jump, action): neighbor entries are
/// tied to the self entry, reducing the observation to the plotted plane.
pub fn cmd_introspect(
    args: &IntrospectArgs,
    out_dir: &Path,
) -> Result<Vec<(f64, f64, f64, usize)>, CliError> {
    if args.grid_points < 2 || args.grid_max <= args.grid_min {
        return Err(CliError::Config("introspection grid is degenerate".into()));
    }
    // The budget only matters for split-mode cost evaluation; introspection
    // works in usage space directly, so any consistent max_cells serves.
    let loaded = load_policy(&args.model, 100, args.cost_weight)?;
    if loaded.meta.obs_dim != 5 {
        return Err(CliError::Config(
            "introspection expects the base 5-entry observation layout".into(),
        ));
    }

    let axis: Vec<f64> = (0..args.grid_points)
        .map(|i| {
            args.grid_min
                + (args.grid_max - args.grid_min) * i as f64 / (args.grid_points - 1) as f64
        })
        .collect();

    let mut rows = Vec::with_capacity(args.usage_values.len() * axis.len() * axis.len());
    for &p in &args.usage_values {
        for &log_self in &axis {
            for &log_mean in &axis {
                let obs = Observation(vec![log_self, log_self, log_self, log_mean, p]);
                let action = loaded.policy.act(&obs);
                rows.push((p, log_self, log_mean, action.index()));
            }
        }
    }

    ensure_out_dir(out_dir)?;
    let mut csv = CsvFile::new(
        INTROSPECT_CSV_HEADER,
        &[
            ("schema", "introspect.v1".into()),
            ("command", "introspect".into()),
            ("grid_min", args.grid_min.to_string()),
            ("grid_max", args.grid_max.to_string()),
            ("grid_points", args.grid_points.to_string()),
        ],
    );
    for &(p, s, m, a) in &rows {
        let name = amrbench_core::env::Action::from_index(a).unwrap().name();
        csv.push_introspect(p, s, m, a, name);
    }
    csv.write(&out_dir.join("introspection.csv"))?;
    Ok(rows)
}
