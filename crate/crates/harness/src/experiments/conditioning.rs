//! Condition numbers of the reduced stiffness matrix on grids, with and
//! without a fraction of perturbed quads treated as polygons.

use anyhow::{Context, Result};
use polyspline::assembly::assemble_system;
use polyspline::preprocess::generate::{perturbed_marked_grid, unit_grid};
use polyspline::preprocess::HybridMesh;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::discretization;
use crate::config::{ExperimentConfig, MeshSource, Perturbation};
use crate::experiments::convergence::franke_problem;

#[derive(Clone, Debug, Serialize)]
pub struct ConditionRecord {
    pub level: usize,
    pub n: usize,
    pub mode: String,
    /// Whether the marked, perturbed mesh was used.
    pub polygons: bool,
    pub n_polygons: usize,
    pub n_dofs: usize,
    pub condition: f64,
}

/// Unit grid of size `n` and its marked counterpart; the generator is seeded
/// per level so every level is reproducible on its own.
pub fn level_meshes(n: usize, level: usize, seed: u64, p: &Perturbation) -> Result<(HybridMesh, HybridMesh)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(level as u64));
    let marked = perturbed_marked_grid(n, p.fraction, (p.range[0], p.range[1]), &mut rng)?;
    Ok((HybridMesh::new(unit_grid(n)), marked))
}

pub fn run_conditioning(config: &ExperimentConfig) -> Result<Vec<ConditionRecord>> {
    let MeshSource::Grid { n } = config.mesh else {
        anyhow::bail!("conditioning runs on grid meshes");
    };
    let p = config.perturbation.unwrap_or(Perturbation { fraction: 0.05, range: [0.2, 0.4] });
    let problem = franke_problem(config)?;
    let opts = config.poly_options()?;
    let mut out = Vec::new();
    for level in 0..config.levels {
        let size = n << level;
        let (plain, marked) = level_meshes(size, level, config.seed, &p)?;
        for mode in &config.modes {
            let disc = discretization(mode)?;
            for (polygons, hm) in [(false, &plain), (true, &marked)] {
                let space = disc.build(hm, problem.pde.as_ref(), &opts)?;
                let sys = assemble_system(&space, &problem, opts.quad_degree)?;
                let condition = sys.condition_number().with_context(|| format!("{mode} on {size}x{size} grid"))?;
                out.push(ConditionRecord {
                    level,
                    n: size,
                    mode: mode.clone(),
                    polygons,
                    n_polygons: hm.polygons().count(),
                    n_dofs: sys.free.len(),
                    condition,
                });
            }
        }
    }
    Ok(out)
}
