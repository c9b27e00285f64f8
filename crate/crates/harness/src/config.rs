//! Experiment configuration (JSON).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{Context, Result};
use polyspline::mesh::read_poly_off;
use polyspline::pde::Pde;
use polyspline::poly::{ConstraintMode, PolyOptions};
use polyspline::preprocess::generate::{grid_with_cross, unit_grid};
use polyspline::preprocess::{ensure_separation, uniform_refine, HybridMesh};
use polyspline::registry::{Params, Strategies};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Convergence,
    Ablation,
    Conditioning,
    Resilience,
    Elasticity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeshSource {
    /// Unit-square `n`x`n` grid.
    Grid { n: usize },
    /// `n`x`n` grid with the central plus sign merged into one polygon.
    Hybrid {
        n: usize,
        #[serde(default)]
        shear: f64,
    },
    /// A poly-off file; separation is enforced after loading.
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeConfig {
    pub name: String,
    #[serde(default)]
    pub params: Params,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    /// Fraction of quads marked as polygons.
    pub fraction: f64,
    /// Displacement range along the diagonal, as a fraction of its length.
    pub range: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub mesh: MeshSource,
    /// Discretization names.
    pub modes: Vec<String>,
    pub pde: PdeConfig,
    /// Number of meshes in the sequence (the base mesh counts as one).
    pub levels: usize,
    pub constraints: ConstraintMode,
    pub kernel: String,
    pub perturbation: Option<Perturbation>,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub quad_degree: usize,
    pub samples_per_edge: usize,
    pub offset_factor: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::Convergence,
            mesh: MeshSource::Grid { n: 8 },
            modes: vec!["q1".into(), "q2".into(), "polyspline".into()],
            pde: PdeConfig { name: "poisson".into(), params: BTreeMap::new() },
            levels: 4,
            constraints: ConstraintMode::Quadratic,
            kernel: "inverse-distance".into(),
            perturbation: None,
            seed: 1,
            output: None,
            quad_degree: 6,
            samples_per_edge: 10,
            offset_factor: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).context("parsing experiment config")?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        anyhow::ensure!(self.levels >= 1, "levels must be at least 1");
        anyhow::ensure!(!self.modes.is_empty(), "at least one mode is required");
        anyhow::ensure!(self.quad_degree >= 1, "quad_degree must be positive");
        anyhow::ensure!(self.samples_per_edge >= 3, "samples_per_edge must be at least 3");
        if let Some(p) = &self.perturbation {
            anyhow::ensure!((0.0..=1.0).contains(&p.fraction), "perturbation fraction must lie in [0, 1]");
            anyhow::ensure!(0.0 <= p.range[0] && p.range[0] <= p.range[1] && p.range[1] < 1.0, "bad displacement range");
        }
        let s = Strategies::default();
        for m in &self.modes {
            s.discretizations.create(m, &Params::new())?;
        }
        s.pdes.create(&self.pde.name, &self.pde.params)?;
        s.kernels.create(&self.kernel, &Params::new())?;
        Ok(())
    }

    pub fn pde(&self) -> Result<Arc<dyn Pde>> {
        Ok(Strategies::default().pdes.create(&self.pde.name, &self.pde.params)?)
    }

    pub fn poly_options(&self) -> Result<PolyOptions> {
        Ok(PolyOptions {
            samples_per_edge: self.samples_per_edge,
            offset_factor: self.offset_factor,
            constraints: self.constraints,
            kernel: Strategies::default().kernels.create(&self.kernel, &Params::new())?,
            quad_degree: self.quad_degree,
            centers_per_edge: None,
        })
    }

    pub fn base_mesh(&self) -> Result<HybridMesh> {
        Ok(match &self.mesh {
            MeshSource::Grid { n } => HybridMesh::new(unit_grid(*n)),
            MeshSource::Hybrid { n, shear } => ensure_separation(&HybridMesh::new(grid_with_cross(*n, *shear)?))?,
            MeshSource::File { path } => ensure_separation(&HybridMesh::new(read_poly_off(path)?))?,
        })
    }

    /// The base mesh followed by `levels - 1` uniform refinements.
    pub fn mesh_sequence(&self) -> Result<Vec<HybridMesh>> {
        let mut out = vec![self.base_mesh()?];
        for _ in 1..self.levels {
            let next = uniform_refine(out.last().unwrap())?;
            out.push(next);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_and_defaults() {
        let c = ExperimentConfig::from_json(r#"{"experiment": "ablation", "mesh": {"kind": "hybrid", "n": 8}, "levels": 3}"#).unwrap();
        assert_eq!(c.experiment, ExperimentKind::Ablation);
        assert_eq!(c.mesh, MeshSource::Hybrid { n: 8, shear: 0.0 });
        assert_eq!(c.samples_per_edge, 10);
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"modes": ["q3"]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kernel": "gauss"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"levels": 0}"#).is_err());
    }

    #[test]
    fn grid_sequence_doubles() {
        let c = ExperimentConfig { levels: 3, mesh: MeshSource::Grid { n: 2 }, ..Default::default() };
        let seq = c.mesh_sequence().unwrap();
        assert_eq!(seq.iter().map(|m| m.mesh.n_faces()).collect::<Vec<_>>(), vec![4, 16, 64]);
    }
}
