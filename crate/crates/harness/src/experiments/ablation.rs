//! The same convergence study with no, linear and quadratic polygon constraints.

use anyhow::Result;
use polyspline::poly::ConstraintMode;

use super::{run_sequence, ConvergenceRecord};
use crate::config::ExperimentConfig;
use crate::experiments::convergence::franke_problem;

pub fn run_constraint_ablation(config: &ExperimentConfig) -> Result<Vec<ConvergenceRecord>> {
    let meshes = config.mesh_sequence()?;
    anyhow::ensure!(meshes[0].polygons().next().is_some(), "ablation needs a mesh with at least one polygon");
    let problem = franke_problem(config)?;
    let mode = config.modes.last().map(String::as_str).unwrap_or("polyspline");
    [ConstraintMode::None, ConstraintMode::Linear, ConstraintMode::Quadratic]
        .into_iter()
        .map(|c| {
            let mut opts = config.poly_options()?;
            opts.constraints = c;
            run_sequence(mode, &meshes, &problem, &opts)
        })
        .collect()
}
