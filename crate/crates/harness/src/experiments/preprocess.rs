//! Preprocessing on a generated corpus of polyomino meshes: star-shape repair,
//! separation and the invariants they promise.

use anyhow::Result;
use polyspline::mesh::PolyMesh;
use polyspline::preprocess::generate::random_polyomino_mesh;
use polyspline::preprocess::{make_star_shaped, polar_refine, polygon_kernel, refine::ensure_separation_with, HybridMesh};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CorpusRecord {
    pub seed: u64,
    pub faces_in: usize,
    pub polygons_in: usize,
    pub max_merge_iterations: usize,
    pub triangulated: usize,
    pub faces_out: usize,
    pub polygons_out: usize,
    pub separated: bool,
    pub star_shaped: bool,
    pub classified: bool,
    /// Relative area change through the whole pipeline.
    pub area_error: f64,
    /// Largest relative area change of a single polar refinement.
    pub polar_area_error: f64,
}

fn relative(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn process_one(mesh: &PolyMesh, seed: u64, rings: usize, target_edge: Option<f64>) -> Result<CorpusRecord> {
    let area = mesh.total_area();
    let (star, report) = make_star_shaped(mesh)?;
    let star = HybridMesh::new(star);
    let mut polar_area_error = 0.0f64;
    for f in star.polygons() {
        let r = polar_refine(&star, f, rings, target_edge)?;
        polar_area_error = polar_area_error.max(relative(r.mesh.total_area(), area));
    }
    let out = ensure_separation_with(&star, rings, target_edge)?;
    let star_shaped = out.polygons().all(|f| polygon_kernel(&out.mesh.face_points(f)).is_star_shaped());
    Ok(CorpusRecord {
        seed,
        faces_in: mesh.n_faces(),
        polygons_in: (0..mesh.n_faces()).filter(|&f| !mesh.is_quad(f)).count(),
        max_merge_iterations: report.max_iterations(),
        triangulated: report.triangulated,
        faces_out: out.mesh.n_faces(),
        polygons_out: out.polygons().count(),
        separated: out.separation_violations().is_empty(),
        star_shaped,
        classified: out.classify().is_ok(),
        area_error: relative(out.mesh.total_area(), area),
        polar_area_error,
    })
}

/// `count` meshes from consecutive seeds starting at `seed`.
pub fn run_corpus(seed: u64, count: usize, rings: usize) -> Result<Vec<CorpusRecord>> {
    (seed..seed + count as u64)
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mesh = random_polyomino_mesh(&mut rng)?;
            process_one(&mesh, s, rings, None)
        })
        .collect()
}
