//! Experiment runners. Each level runs the full pipeline: bases, assembly,
//! solve and error measurement.

pub mod ablation;
pub mod conditioning;
pub mod convergence;
pub mod elasticity;
pub mod preprocess;
pub mod resilience;

use std::sync::Arc;
use std::time::Instant;

use anyhow::{Context, Result};
use polyspline::assembly::{assemble_system, error_norms, solve};
use polyspline::discretization::Discretization;
use polyspline::poly::PolyOptions;
use polyspline::preprocess::HybridMesh;
use polyspline::problem::Problem;
use polyspline::registry::{Params, Strategies};
use serde::Serialize;

use crate::rates::{rate, Rate};

/// Quadrature degree for error integrals (above the assembly degree).
pub const ERROR_DEGREE: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    /// Maximum edge length.
    pub h: f64,
    pub n_dofs: usize,
    pub l2: f64,
    pub linf: f64,
    pub h1: f64,
    pub t_basis: f64,
    pub t_assembly: f64,
    pub t_solve: f64,
    pub nnz: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRecord {
    pub mode: String,
    pub constraints: String,
    pub levels: Vec<LevelRecord>,
    pub l2: Rate,
    pub linf: Rate,
    pub h1: Rate,
}

impl ConvergenceRecord {
    pub fn new(mode: &str, constraints: &str, levels: Vec<LevelRecord>) -> Self {
        let h: Vec<f64> = levels.iter().map(|l| l.h).collect();
        let pick = |f: fn(&LevelRecord) -> f64| -> Vec<f64> { levels.iter().map(f).collect() };
        let (l2, linf, h1) = if levels.len() >= 2 {
            (rate(&h, &pick(|l| l.l2)), rate(&h, &pick(|l| l.linf)), rate(&h, &pick(|l| l.h1)))
        } else {
            Default::default()
        };
        Self { mode: mode.into(), constraints: constraints.into(), levels, l2, linf, h1 }
    }
}

pub fn discretization(name: &str) -> Result<Arc<dyn Discretization>> {
    Ok(Strategies::default().discretizations.create(name, &Params::new())?)
}

/// Runs one mesh through the whole pipeline.
pub fn run_level(level: usize, disc: &dyn Discretization, hm: &HybridMesh, problem: &Problem, opts: &PolyOptions) -> Result<LevelRecord> {
    let pde = problem.pde.as_ref();
    let t0 = Instant::now();
    let space = disc.build(hm, pde, opts).with_context(|| format!("{} bases at level {level}", disc.name()))?;
    let t1 = Instant::now();
    let sys = assemble_system(&space, problem, opts.quad_degree).with_context(|| format!("assembly at level {level}"))?;
    let t2 = Instant::now();
    let u = solve(&sys).with_context(|| format!("solve at level {level}"))?;
    let t3 = Instant::now();
    let exact = problem.exact.as_ref().context("error norms need an exact solution")?;
    let e = error_norms(&space, &u, pde.components(), exact.as_ref(), ERROR_DEGREE)?;
    Ok(LevelRecord {
        level,
        h: hm.mesh.max_edge_length(),
        n_dofs: sys.n(),
        l2: e.l2,
        linf: e.linf,
        h1: e.h1,
        t_basis: (t1 - t0).as_secs_f64(),
        t_assembly: (t2 - t1).as_secs_f64(),
        t_solve: (t3 - t2).as_secs_f64(),
        nnz: sys.k.nnz(),
    })
}

/// Runs a mesh sequence for one discretization.
pub fn run_sequence(mode: &str, meshes: &[HybridMesh], problem: &Problem, opts: &PolyOptions) -> Result<ConvergenceRecord> {
    let disc = discretization(mode)?;
    let levels = meshes
        .iter()
        .enumerate()
        .map(|(l, hm)| run_level(l, disc.as_ref(), hm, problem, opts))
        .collect::<Result<Vec<_>>>()?;
    let c = serde_json::to_value(opts.constraints)?;
    Ok(ConvergenceRecord::new(mode, c.as_str().unwrap_or("?"), levels))
}

/// Result of any configured experiment.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "experiment", content = "results", rename_all = "lowercase")]
pub enum Outcome {
    Convergence(Vec<ConvergenceRecord>),
    Ablation(Vec<ConvergenceRecord>),
    Conditioning(Vec<conditioning::ConditionRecord>),
    Resilience(Vec<resilience::ShapeRecord>),
    Elasticity(elasticity::ElasticityReport),
}

/// Dispatches on `config.experiment`.
pub fn run(config: &crate::config::ExperimentConfig) -> Result<Outcome> {
    use crate::config::ExperimentKind as K;
    Ok(match config.experiment {
        K::Convergence => Outcome::Convergence(convergence::run_convergence(config)?),
        K::Ablation => Outcome::Ablation(ablation::run_constraint_ablation(config)?),
        K::Conditioning => Outcome::Conditioning(conditioning::run_conditioning(config)?),
        K::Resilience => Outcome::Resilience(resilience::run_resilience(config)?),
        K::Elasticity => Outcome::Elasticity(elasticity::run_elasticity(config)?),
    })
}
