//! Bringing arbitrary polygonal meshes into the admissible class: star-shaped
//! polygons that touch neither each other nor the boundary.

pub mod generate;
pub mod kernel;
pub mod merge;
pub mod refine;

pub use kernel::{polygon_kernel, StarShapeInfo};
pub use merge::{make_star_shaped, merge_groups, StarReport};
pub use refine::{ensure_separation, polar_refine, uniform_refine};

use crate::error::Result;
use crate::mesh::{classify_cells, CellClass, PolyMesh};

/// A mesh together with the faces treated as polygons. Non-quads are always
/// polygons; quads can be marked explicitly.
#[derive(Clone, Debug)]
pub struct HybridMesh {
    pub mesh: PolyMesh,
    pub polygon: Vec<bool>,
}

impl HybridMesh {
    pub fn new(mesh: PolyMesh) -> Self {
        let polygon = (0..mesh.n_faces()).map(|f| !mesh.is_quad(f)).collect();
        Self { mesh, polygon }
    }

    pub fn with_marks(mesh: PolyMesh, marked: &[bool]) -> Self {
        let polygon = (0..mesh.n_faces()).map(|f| !mesh.is_quad(f) || marked[f]).collect();
        Self { mesh, polygon }
    }

    pub fn is_polygon(&self, f: usize) -> bool {
        self.polygon[f]
    }

    pub fn polygons(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.polygon.len()).filter(|&f| self.polygon[f])
    }

    pub fn classify(&self) -> Result<Vec<CellClass>> {
        classify_cells(&self.mesh, &|f| self.polygon[f])
    }

    /// Polygons touching the boundary or another polygon.
    pub fn separation_violations(&self) -> Vec<usize> {
        self.polygons()
            .filter(|&f| self.mesh.face_touches_boundary(f) || self.mesh.one_ring(f).iter().any(|&g| self.polygon[g]))
            .collect()
    }
}

/// Full preprocessing: star-shape repair followed by separation.
pub fn preprocess(mesh: &PolyMesh, rings: usize, target_edge: Option<f64>) -> Result<(HybridMesh, StarReport)> {
    let (star, report) = make_star_shaped(mesh)?;
    let hm = refine::ensure_separation_with(&HybridMesh::new(star), rings, target_edge)?;
    Ok((hm, report))
}
