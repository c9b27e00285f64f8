//! Conforming refinement: quads are split along edge "sheets" so that shared
//! edges always receive the same number of segments, and polygons may be
//! polar-refined into rings of quads around a shrunken copy.

use super::kernel::polygon_kernel;
use super::HybridMesh;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::PolyMesh;

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Splits edges and polar-refines the faces in `polar` (face, rings).
///
/// `requested[e]` is a lower bound on the segment count of edge `e`; counts are
/// raised to the maximum over each sheet of opposite quad edges.
pub fn refine(hm: &HybridMesh, requested: &[usize], polar: &[(usize, usize)]) -> Result<HybridMesh> {
    let mesh = &hm.mesh;
    let ne = mesh.n_edges();
    let mut uf = UnionFind::new(ne);
    for f in 0..mesh.n_faces() {
        if !hm.is_polygon(f) {
            uf.union(mesh.face_edge(f, 0), mesh.face_edge(f, 2));
            uf.union(mesh.face_edge(f, 1), mesh.face_edge(f, 3));
        }
    }
    let mut sheet = vec![1usize; ne];
    for (e, &r) in requested.iter().enumerate() {
        let root = uf.find(e);
        sheet[root] = sheet[root].max(r.max(1));
    }
    let counts: Vec<usize> = (0..ne).map(|e| sheet[uf.find(e)]).collect();

    let mut vertices: Vec<Point> = mesh.vertices().to_vec();
    // vertex ids along each edge from verts[0] to verts[1], endpoints included
    let edge_points: Vec<Vec<usize>> = (0..ne)
        .map(|e| {
            let [a, b] = mesh.edge(e).verts;
            let s = counts[e];
            let mut ids = vec![a];
            for k in 1..s {
                let t = k as f64 / s as f64;
                ids.push(vertices.len());
                vertices.push(mesh.vertex(a) * (1.0 - t) + mesh.vertex(b) * t);
            }
            ids.push(b);
            ids
        })
        .collect();
    let side = |f: usize, i: usize| -> Vec<usize> {
        let e = mesh.face_edge(f, i);
        let mut ids = edge_points[e].clone();
        if mesh.edge(e).verts[0] != mesh.face(f)[i] {
            ids.reverse();
        }
        ids
    };

    let mut rings = vec![0usize; mesh.n_faces()];
    for &(f, r) in polar {
        if !hm.is_polygon(f) && !mesh.is_quad(f) {
            return Err(Error::Invalid(format!("face {f} cannot be polar-refined")));
        }
        rings[f] = r.max(1);
    }

    let mut faces = Vec::new();
    let mut is_poly = Vec::new();
    for f in 0..mesh.n_faces() {
        let k = mesh.arity(f);
        if rings[f] > 0 {
            let boundary: Vec<usize> = (0..k).flat_map(|i| {
                let s = side(f, i);
                s[..s.len() - 1].to_vec()
            }).collect();
            let info = polygon_kernel(&mesh.face_points(f));
            let c = info.chosen_center.ok_or(Error::NotStarShaped(f))?;
            let r = rings[f];
            let mut layers: Vec<Vec<usize>> = Vec::with_capacity(r + 1);
            for l in 1..=r {
                let t = l as f64 / (r + 1) as f64;
                let ids = boundary
                    .iter()
                    .map(|&v| {
                        vertices.push(c + (vertices[v] - c) * t);
                        vertices.len() - 1
                    })
                    .collect();
                layers.push(ids);
            }
            layers.push(boundary);
            faces.push(layers[0].clone());
            is_poly.push(true);
            let m = layers[0].len();
            for l in 0..r {
                let (inner, outer) = (&layers[l], &layers[l + 1]);
                for i in 0..m {
                    let j = (i + 1) % m;
                    faces.push(vec![outer[i], outer[j], inner[j], inner[i]]);
                    is_poly.push(false);
                }
            }
        } else if hm.is_polygon(f) {
            let loop_: Vec<usize> = (0..k).flat_map(|i| {
                let s = side(f, i);
                s[..s.len() - 1].to_vec()
            }).collect();
            faces.push(loop_);
            is_poly.push(true);
        } else {
            let (l0, l1, l2, l3) = (side(f, 0), side(f, 1), side(f, 2), side(f, 3));
            let (su, sv) = (l0.len() - 1, l1.len() - 1);
            let corners = mesh.face_points(f);
            let mut grid = vec![vec![usize::MAX; sv + 1]; su + 1];
            for i in 0..=su {
                grid[i][0] = l0[i];
                grid[i][sv] = l2[su - i];
            }
            for j in 0..=sv {
                grid[su][j] = l1[j];
                grid[0][j] = l3[sv - j];
            }
            for i in 1..su {
                for j in 1..sv {
                    let (u, v) = (i as f64 / su as f64, j as f64 / sv as f64);
                    let p = corners[0] * ((1.0 - u) * (1.0 - v))
                        + corners[1] * (u * (1.0 - v))
                        + corners[2] * (u * v)
                        + corners[3] * ((1.0 - u) * v);
                    grid[i][j] = vertices.len();
                    vertices.push(p);
                }
            }
            for j in 0..sv {
                for i in 0..su {
                    faces.push(vec![grid[i][j], grid[i + 1][j], grid[i + 1][j + 1], grid[i][j + 1]]);
                    is_poly.push(false);
                }
            }
        }
    }
    let mesh = PolyMesh::new(vertices, faces)?;
    Ok(HybridMesh { mesh, polygon: is_poly })
}

/// Segment count per edge so that the shortest piece is closest to `target`.
fn choose_splits(min_len: f64, target: f64) -> usize {
    let guess = (min_len / target).max(1.0);
    let (lo, hi) = (guess.floor().max(1.0) as usize, guess.ceil().max(1.0) as usize);
    if (min_len / lo as f64 - target).abs() <= (min_len / hi as f64 - target).abs() {
        lo
    } else {
        hi
    }
}

fn polar_requests(hm: &HybridMesh, faces: &[usize], target_edge: Option<f64>) -> Vec<usize> {
    let mesh = &hm.mesh;
    let target = target_edge.unwrap_or_else(|| mesh.average_edge_length());
    let mut req = vec![1usize; mesh.n_edges()];
    for &f in faces {
        let es = mesh.face_edges(f);
        let min_len = es.iter().map(|&e| mesh.edge_length(e)).fold(f64::INFINITY, f64::min);
        let s = choose_splits(min_len, target);
        for e in es {
            req[e] = req[e].max(s);
        }
    }
    req
}

/// Polar refinement of one polygon with `rings` quad layers; its edges are split
/// so the shortest segment is closest to `target_edge` (default: the mesh
/// average edge length).
pub fn polar_refine(hm: &HybridMesh, face: usize, rings: usize, target_edge: Option<f64>) -> Result<HybridMesh> {
    let req = polar_requests(hm, &[face], target_edge);
    refine(hm, &req, &[(face, rings)])
}

/// Surrounds every polygon that touches the boundary or another polygon with
/// one ring of quads.
pub fn ensure_separation(hm: &HybridMesh) -> Result<HybridMesh> {
    ensure_separation_with(hm, 1, None)
}

pub fn ensure_separation_with(hm: &HybridMesh, rings: usize, target_edge: Option<f64>) -> Result<HybridMesh> {
    let mut cur = hm.clone();
    for _ in 0..4 {
        let bad = cur.separation_violations();
        if bad.is_empty() {
            return Ok(cur);
        }
        for &f in &bad {
            if !polygon_kernel(&cur.mesh.face_points(f)).is_star_shaped() {
                return Err(Error::NotStarShaped(f));
            }
        }
        let req = polar_requests(&cur, &bad, target_edge);
        let polar: Vec<(usize, usize)> = bad.iter().map(|&f| (f, rings)).collect();
        cur = refine(&cur, &req, &polar)?;
    }
    match cur.separation_violations().first() {
        None => Ok(cur),
        Some(&f) => Err(Error::SeparationViolated(f)),
    }
}

/// One level of uniform refinement: quads split in four, polygons polar-refined
/// with one ring after halving their edges.
pub fn uniform_refine(hm: &HybridMesh) -> Result<HybridMesh> {
    let req = vec![2usize; hm.mesh.n_edges()];
    let polar: Vec<(usize, usize)> = hm.polygons().map(|f| (f, 1)).collect();
    refine(hm, &req, &polar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pt;
    use crate::preprocess::generate::{grid_with_cross, unit_grid};

    fn square_polygon() -> HybridMesh {
        let m = PolyMesh::new(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)], vec![vec![0, 1, 2, 3]]).unwrap();
        HybridMesh::with_marks(m, &[true])
    }

    #[test]
    fn grid_refines_to_double_resolution() {
        let hm = HybridMesh::new(unit_grid(3));
        let r = uniform_refine(&hm).unwrap();
        assert_eq!(r.mesh.n_faces(), 36);
        assert_eq!(r.mesh.n_vertices(), 49);
        assert!((r.mesh.max_edge_length() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn square_polygon_one_ring() {
        let hm = square_polygon();
        let r = polar_refine(&hm, 0, 1, Some(1.0)).unwrap();
        // central 4-gon and one quad per boundary segment
        assert_eq!(r.mesh.n_faces(), 5);
        assert_eq!(r.mesh.n_vertices(), 8);
        assert_eq!(r.mesh.euler_characteristic(), 1);
        assert_eq!(r.polygon.iter().filter(|&&p| p).count(), 1);
        assert!((r.mesh.total_area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_splits_double_the_ring() {
        let hm = square_polygon();
        let r = polar_refine(&hm, 0, 1, Some(0.5)).unwrap();
        let central = r.polygons().next().unwrap();
        assert_eq!(r.mesh.arity(central), 8);
        assert_eq!(r.mesh.n_faces(), 9);
        assert_eq!(r.mesh.euler_characteristic(), 1);
    }

    #[test]
    fn polar_refine_propagates_splits_to_neighbors() {
        let m = grid_with_cross(7, 0.0).unwrap();
        let hm = HybridMesh::new(m);
        let poly = hm.polygons().next().unwrap();
        let area = hm.mesh.total_area();
        let r = polar_refine(&hm, poly, 2, Some(1.0 / 14.0)).unwrap();
        assert!(((r.mesh.total_area() - area) / area).abs() < 1e-12);
        assert_eq!(r.mesh.euler_characteristic(), 1);
        // polygon with 12 edges split twice and two rings
        let central = r.polygons().next().unwrap();
        assert_eq!(r.mesh.arity(central), 24);
    }

    #[test]
    fn separation_rings_boundary_polygon() {
        let m = PolyMesh::new(
            vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 0.0), pt(2.0, 1.0), pt(1.0, 1.0), pt(0.0, 1.0)],
            vec![vec![0, 1, 2, 3, 4, 5]],
        )
        .unwrap();
        let r = ensure_separation(&HybridMesh::new(m)).unwrap();
        assert!(r.separation_violations().is_empty());
        assert!(r.classify().is_ok());
    }

    #[test]
    fn split_choice_is_nearest() {
        assert_eq!(choose_splits(1.0, 1.0), 1);
        assert_eq!(choose_splits(1.0, 0.5), 2);
        assert_eq!(choose_splits(1.0, 0.3), 3);
        assert_eq!(choose_splits(0.2, 1.0), 1);
    }
}
