//! Franke convergence on a mesh sequence for every configured discretization.

use std::sync::Arc;

use anyhow::Result;
use polyspline::problem::Problem;

use super::{run_sequence, ConvergenceRecord};
use crate::config::ExperimentConfig;
use crate::franke::Franke;

pub fn franke_problem(config: &ExperimentConfig) -> Result<Problem> {
    Ok(Problem::manufactured(config.pde()?, Arc::new(Franke)))
}

pub fn run_convergence(config: &ExperimentConfig) -> Result<Vec<ConvergenceRecord>> {
    let meshes = config.mesh_sequence()?;
    let problem = franke_problem(config)?;
    let opts = config.poly_options()?;
    config.modes.iter().map(|m| run_sequence(m, &meshes, &problem, &opts)).collect()
}
