//! Plane-strain elasticity: convergence for a smooth vector field and checks
//! on rigid motions.

use std::sync::Arc;

use anyhow::Result;
use polyspline::assembly::{assemble_stiffness, l2_projection};
use polyspline::geometry::Point;
use polyspline::problem::{Problem, QuadraticField};
use serde::Serialize;

use super::{discretization, run_level, run_sequence, ConvergenceRecord};
use crate::config::ExperimentConfig;
use crate::franke::FrankeVector;

#[derive(Clone, Debug, Serialize)]
pub struct ElasticityReport {
    pub convergence: Vec<ConvergenceRecord>,
    /// Largest L-infinity error per level with a rigid translation as exact solution.
    pub translation_error: Vec<f64>,
    /// `max |K v| / max |K|` over the two translations and the rotation, coarsest mesh.
    pub rigid_kernel_residual: f64,
}

/// A constant displacement.
pub fn translation() -> QuadraticField {
    QuadraticField::vector([0.3, 0.0, 0.0, 0.0, 0.0, 0.0], [-0.7, 0.0, 0.0, 0.0, 0.0, 0.0])
}

pub fn run_elasticity(config: &ExperimentConfig) -> Result<ElasticityReport> {
    let pde = config.pde()?;
    anyhow::ensure!(pde.components() == 2, "elasticity experiment needs a vector PDE");
    let meshes = config.mesh_sequence()?;
    let opts = config.poly_options()?;
    let problem = Problem::manufactured(pde.clone(), Arc::new(FrankeVector));
    let convergence = config.modes.iter().map(|m| run_sequence(m, &meshes, &problem, &opts)).collect::<Result<Vec<_>>>()?;

    let mode = config.modes.last().map(String::as_str).unwrap_or("polyspline");
    let disc = discretization(mode)?;
    let rigid = Problem::manufactured(pde.clone(), Arc::new(translation()));
    let translation_error =
        meshes.iter().enumerate().map(|(l, hm)| Ok(run_level(l, disc.as_ref(), hm, &rigid, &opts)?.linf)).collect::<Result<Vec<_>>>()?;

    let space = disc.build(&meshes[0], pde.as_ref(), &opts)?;
    let k = assemble_stiffness(&space, pde.as_ref(), opts.quad_degree)?;
    let scale = k.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let n = space.n_dofs();
    let mut modes: Vec<Vec<f64>> = Vec::new();
    for c in 0..2 {
        modes.push((0..2 * n).map(|i| if i % 2 == c { 1.0 } else { 0.0 }).collect());
    }
    let rotation = |x: &Point| [-x.y, x.x];
    let r = l2_projection(&space, &rotation, 2, opts.quad_degree)?;
    modes.push(r);
    let rigid_kernel_residual = modes
        .iter()
        .map(|v| k.mul_vec(v).iter().fold(0.0f64, |m, x| m.max(x.abs())) / scale)
        .fold(0.0, f64::max);
    Ok(ElasticityReport { convergence, translation_error, rigid_kernel_residual })
}
