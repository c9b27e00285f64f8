//! Splitting the face set into spline-compatible quads, plain Q2 quads and polygons.

use serde::{Deserialize, Serialize};

use super::PolyMesh;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellClass {
    SplineCompatible,
    Q2Quad,
    Polygon,
}

/// Mesh entity that carries a spline degree of freedom in a cell's 3x3 stencil.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OneRingEntity {
    Face(usize),
    Edge(usize),
    Vertex(usize),
}

/// The 3x3 stencil around a spline-compatible quad in the quad's local frame.
///
/// `entities[a][b]` sits at offset `(a - 1, b - 1)`; `u` runs along local edge 0
/// (from vertex 0 to vertex 1) and `v` along local edge 3 reversed (from vertex 0 to vertex 3).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalGrid {
    pub entities: [[OneRingEntity; 3]; 3],
    /// Truncated sides: [u = 0, u = 1, v = 0, v = 1].
    pub boundary: [bool; 4],
}

// local edge i -> offset in the stencil
const EDGE_OFFSET: [(usize, usize); 4] = [(1, 0), (2, 1), (1, 2), (0, 1)];
// local vertex i -> offset in the stencil
const VERTEX_OFFSET: [(usize, usize); 4] = [(0, 0), (2, 0), (2, 2), (0, 2)];

/// Builds the 3x3 stencil of `f`, or `None` if its one-ring is not a (possibly
/// boundary-truncated) regular grid of quads.
pub fn local_grid(mesh: &PolyMesh, f: usize, is_polygon: &dyn Fn(usize) -> bool) -> Option<LocalGrid> {
    if !mesh.is_quad(f) || is_polygon(f) {
        return None;
    }
    let verts = mesh.face(f);
    let mut nbr = [None; 4];
    let mut bnd = [false; 4];
    for i in 0..4 {
        match mesh.neighbor(f, i) {
            Some(g) => {
                if !mesh.is_quad(g) || is_polygon(g) {
                    return None;
                }
                nbr[i] = Some(g);
            }
            None => bnd[i] = true,
        }
    }
    let mut ent = [[OneRingEntity::Face(f); 3]; 3];
    for i in 0..4 {
        let (a, b) = EDGE_OFFSET[i];
        ent[a][b] = match nbr[i] {
            Some(g) => OneRingEntity::Face(g),
            None => OneRingEntity::Edge(mesh.face_edge(f, i)),
        };
    }
    for i in 0..4 {
        let v = verts[i];
        let e_in = (i + 3) % 4;
        let e_out = i;
        let fan = mesh.vertex_faces(v);
        let entity = match (bnd[e_in], bnd[e_out]) {
            (false, false) => {
                if mesh.vertex_on_boundary(v) || fan.len() != 4 {
                    return None;
                }
                let (p, q) = (nbr[e_in].unwrap(), nbr[e_out].unwrap());
                if p == q {
                    return None;
                }
                let diag: Vec<usize> = fan.iter().copied().filter(|&g| g != f && g != p && g != q).collect();
                if diag.len() != 1 {
                    return None;
                }
                let d = diag[0];
                if !mesh.is_quad(d) || is_polygon(d) || !mesh.faces_share_edge(d, p) || !mesh.faces_share_edge(d, q) {
                    return None;
                }
                OneRingEntity::Face(d)
            }
            (true, true) => {
                if fan.len() != 1 {
                    return None;
                }
                OneRingEntity::Vertex(v)
            }
            (in_b, _) => {
                // one side truncated: the stencil entry is the boundary edge of the
                // neighbor across the interior side
                if fan.len() != 2 {
                    return None;
                }
                let g = if in_b { nbr[e_out].unwrap() } else { nbr[e_in].unwrap() };
                let shared = if in_b { mesh.face_edge(f, e_out) } else { mesh.face_edge(f, e_in) };
                let k = mesh.arity(g);
                let mut found = None;
                for j in 0..k {
                    let e = mesh.face_edge(g, j);
                    if e != shared && mesh.edge(e).verts.contains(&v) {
                        found = Some(e);
                    }
                }
                let e = found?;
                if !mesh.edge_is_boundary(e) {
                    return None;
                }
                OneRingEntity::Edge(e)
            }
        };
        let (a, b) = VERTEX_OFFSET[i];
        ent[a][b] = entity;
    }

    // the stencil must list every face of the one-ring exactly once
    let mut faces: Vec<usize> = ent
        .iter()
        .flatten()
        .filter_map(|e| match e {
            OneRingEntity::Face(g) => Some(*g),
            _ => None,
        })
        .collect();
    let n_listed = faces.len();
    faces.sort_unstable();
    faces.dedup();
    if faces.len() != n_listed {
        return None;
    }
    let mut ring = mesh.one_ring(f);
    ring.push(f);
    ring.sort_unstable();
    if ring != faces {
        return None;
    }

    // [u = 0, u = 1, v = 0, v = 1] <- local edges 3, 1, 0, 2
    Some(LocalGrid { entities: ent, boundary: [bnd[3], bnd[1], bnd[0], bnd[2]] })
}

/// Combinatorial regularity test for the tensor-product spline stencil.
pub fn is_spline_compatible(mesh: &PolyMesh, f: usize) -> bool {
    local_grid(mesh, f, &|g| !mesh.is_quad(g)).is_some()
}

/// Classifies every face. Faces for which `is_polygon` holds (by default every
/// non-quad) become polygons; quads touching a polygon are demoted to Q2.
pub fn classify_cells(mesh: &PolyMesh, is_polygon: &dyn Fn(usize) -> bool) -> Result<Vec<CellClass>> {
    let n = mesh.n_faces();
    let poly: Vec<bool> = (0..n).map(|f| !mesh.is_quad(f) || is_polygon(f)).collect();
    for f in (0..n).filter(|&f| poly[f]) {
        if mesh.face_touches_boundary(f) || mesh.one_ring(f).iter().any(|&g| poly[g]) {
            return Err(Error::SeparationViolated(f));
        }
    }
    let out = (0..n)
        .map(|f| {
            if poly[f] {
                CellClass::Polygon
            } else if mesh.one_ring(f).iter().any(|&g| poly[g]) {
                CellClass::Q2Quad
            } else if local_grid(mesh, f, &|g| poly[g]).is_some() {
                CellClass::SplineCompatible
            } else {
                CellClass::Q2Quad
            }
        })
        .collect();
    Ok(out)
}

/// Same separation checks as [`classify_cells`] but every quad is a Q2 (or Q1) cell.
pub fn classify_quads_as(mesh: &PolyMesh, is_polygon: &dyn Fn(usize) -> bool) -> Result<Vec<CellClass>> {
    let mut classes = classify_cells(mesh, is_polygon)?;
    for c in classes.iter_mut() {
        if *c == CellClass::SplineCompatible {
            *c = CellClass::Q2Quad;
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pt;
    use crate::mesh::tests::grid;

    fn not_poly(_: usize) -> bool {
        false
    }

    #[test]
    fn center_of_three_by_three_is_compatible() {
        let m = grid(3);
        assert!(is_spline_compatible(&m, 4));
        let g = local_grid(&m, 4, &not_poly).unwrap();
        assert_eq!(g.boundary, [false; 4]);
        assert_eq!(g.entities[0][0], OneRingEntity::Face(0));
        assert_eq!(g.entities[2][2], OneRingEntity::Face(8));
        assert_eq!(g.entities[1][0], OneRingEntity::Face(1));
    }

    #[test]
    fn corner_quad_is_compatible_with_truncated_stencil() {
        let m = grid(3);
        let g = local_grid(&m, 0, &not_poly).unwrap();
        assert_eq!(g.boundary, [true, false, true, false]);
        assert_eq!(g.entities[0][0], OneRingEntity::Vertex(0));
        assert!(matches!(g.entities[0][1], OneRingEntity::Edge(_)));
        assert!(matches!(g.entities[1][0], OneRingEntity::Edge(_)));
        assert_eq!(g.entities[2][2], OneRingEntity::Face(4));
    }

    #[test]
    fn all_cells_of_five_by_five_are_spline() {
        let m = grid(5);
        let classes = classify_cells(&m, &not_poly).unwrap();
        assert!(classes.iter().all(|&c| c == CellClass::SplineCompatible));
    }

    #[test]
    fn valence_five_vertex_breaks_regularity() {
        // 2x2 grid around a center vertex with one extra triangle wedge -> valence 5
        // Built as a fan of 5 quads around the origin.
        let mut vs = vec![pt(0.0, 0.0)];
        let k = 5;
        for i in 0..k {
            let a = std::f64::consts::TAU * i as f64 / k as f64;
            let b = a + std::f64::consts::TAU / (2 * k) as f64;
            vs.push(pt(a.cos(), a.sin()));
            vs.push(pt(1.5 * b.cos(), 1.5 * b.sin()));
        }
        let mut fs = Vec::new();
        for i in 0..k {
            let p = 1 + 2 * i;
            let mid = p + 1;
            let q = 1 + 2 * ((i + 1) % k);
            fs.push(vec![0, p, mid, q]);
        }
        let m = PolyMesh::new(vs, fs).unwrap();
        for f in 0..m.n_faces() {
            assert!(!is_spline_compatible(&m, f));
        }
    }

    #[test]
    fn pentagon_neighbors_are_forced_to_q2() {
        let m = crate::preprocess::generate::grid_with_cross(7, 0.0).unwrap();
        let classes = classify_cells(&m, &|_| false).unwrap();
        for f in 0..m.n_faces() {
            if classes[f] == CellClass::Polygon {
                for g in m.one_ring(f) {
                    assert_eq!(classes[g], CellClass::Q2Quad);
                }
                for i in 0..m.arity(f) {
                    let g = m.neighbor(f, i).unwrap();
                    assert_eq!(classes[g], CellClass::Q2Quad);
                }
            }
        }
        assert!(classes.contains(&CellClass::SplineCompatible));
        // idempotent
        assert_eq!(classes, classify_cells(&m, &|_| false).unwrap());
    }

    #[test]
    fn polygon_touching_boundary_is_rejected() {
        let vs = vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 0.0), pt(2.0, 1.0), pt(1.0, 1.0), pt(0.0, 1.0)];
        let m = PolyMesh::new(vs, vec![vec![0, 1, 2, 3, 4, 5]]).unwrap();
        assert!(matches!(classify_cells(&m, &|_| false), Err(Error::SeparationViolated(0))));
    }
}
