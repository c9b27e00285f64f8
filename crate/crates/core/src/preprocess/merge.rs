//! Face merging: replacing groups of faces by their outer boundary loop, and the
//! star-shape repair built on top of it.

use std::collections::{HashMap, HashSet};

use super::kernel::polygon_kernel;
use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use crate::mesh::PolyMesh;

/// Boundary half-edges of a face group as one counterclockwise loop, or `None`
/// if the union has holes or pinch vertices.
pub fn group_boundary(mesh: &PolyMesh, group: &[usize]) -> Option<Vec<usize>> {
    let inside: HashSet<usize> = group.iter().copied().collect();
    let mut by_origin: HashMap<usize, usize> = HashMap::new();
    let mut count = 0;
    for &f in group {
        for i in 0..mesh.arity(f) {
            let h = mesh.halfedge(f, i);
            let outer = match mesh.he_twin(h) {
                Some(t) => !inside.contains(&mesh.he_face(t)),
                None => true,
            };
            if outer {
                if by_origin.insert(mesh.he_origin(h), h).is_some() {
                    return None;
                }
                count += 1;
            }
        }
    }
    let start = *by_origin.values().min()?;
    let mut loop_ = vec![start];
    let mut h = start;
    loop {
        let next = *by_origin.get(&mesh.he_target(h))?;
        if next == start {
            break;
        }
        loop_.push(next);
        h = next;
        if loop_.len() > count {
            return None;
        }
    }
    (loop_.len() == count).then_some(loop_)
}

/// Replaces every group by a single face bounded by its outer loop and drops
/// vertices that are no longer referenced. Groups must be disjoint.
pub fn merge_groups(mesh: &PolyMesh, groups: &[Vec<usize>]) -> Result<PolyMesh> {
    let mut owner = vec![usize::MAX; mesh.n_faces()];
    let mut loops = Vec::with_capacity(groups.len());
    for (gi, g) in groups.iter().enumerate() {
        for &f in g {
            if owner[f] != usize::MAX {
                return Err(Error::MergeFailed(format!("face {f} in two groups")));
            }
            owner[f] = gi;
        }
        let hs = group_boundary(mesh, g).ok_or_else(|| Error::MergeFailed(format!("group {gi} is not a disk")))?;
        loops.push(hs.iter().map(|&h| mesh.he_origin(h)).collect::<Vec<_>>());
    }
    let mut faces = Vec::new();
    let mut emitted = vec![false; groups.len()];
    for f in 0..mesh.n_faces() {
        match owner[f] {
            usize::MAX => faces.push(mesh.face(f).to_vec()),
            gi if !emitted[gi] => {
                emitted[gi] = true;
                faces.push(loops[gi].clone());
            }
            _ => {}
        }
    }
    compact(mesh.vertices(), faces)
}

/// Builds a mesh from faces, renumbering the referenced vertices in order of first use.
pub fn compact(vertices: &[Point], faces: Vec<Vec<usize>>) -> Result<PolyMesh> {
    let mut map = vec![usize::MAX; vertices.len()];
    let mut used = vec![false; vertices.len()];
    for f in &faces {
        for &v in f {
            used[v] = true;
        }
    }
    let mut verts = Vec::new();
    for (v, &u) in used.iter().enumerate() {
        if u {
            map[v] = verts.len();
            verts.push(vertices[v]);
        }
    }
    let faces = faces.into_iter().map(|f| f.into_iter().map(|v| map[v]).collect()).collect();
    PolyMesh::new(verts, faces)
}

#[derive(Clone, Debug, Default)]
pub struct StarReport {
    /// Merge rounds needed by each repaired polygon.
    pub iterations: Vec<usize>,
    /// Polygons that needed the triangulation fallback.
    pub triangulated: usize,
}

impl StarReport {
    pub fn max_iterations(&self) -> usize {
        self.iterations.iter().copied().max().unwrap_or(0)
    }
}

const MAX_MERGE_ROUNDS: usize = 8;

/// Grows every non-star-shaped polygon by merging the faces hit by the segments
/// from its barycenter to its vertices, until the union is star-shaped.
/// Polygons that cannot be repaired this way are triangulated and regrouped.
pub fn make_star_shaped(mesh: &PolyMesh) -> Result<(PolyMesh, StarReport)> {
    let mut mesh = mesh.clone();
    let mut report = StarReport::default();
    let mut guard = 0;
    loop {
        let bad = (0..mesh.n_faces()).find(|&f| !mesh.is_quad(f) && !polygon_kernel(&mesh.face_points(f)).is_star_shaped());
        let Some(f) = bad else { break };
        guard += 1;
        if guard > 10 * mesh.n_faces().max(10) {
            return Err(Error::MergeFailed("no progress".into()));
        }
        match grow_to_star(&mesh, f)? {
            Some((group, rounds)) => {
                report.iterations.push(rounds);
                mesh = merge_groups(&mesh, &[group])?;
            }
            None => {
                report.triangulated += 1;
                mesh = split_into_star_groups(&mesh, f)?;
            }
        }
    }
    Ok((mesh, report))
}

fn grow_to_star(mesh: &PolyMesh, f: usize) -> Result<Option<(Vec<usize>, usize)>> {
    let mut group = vec![f];
    for round in 1..=MAX_MERGE_ROUNDS {
        let Some(hs) = group_boundary(mesh, &group) else { return Ok(None) };
        let pts: Vec<Point> = hs.iter().map(|&h| mesh.vertex(mesh.he_origin(h))).collect();
        let n = pts.len();
        let c = geometry::centroid(&pts);
        let scale = geometry::bbox_diagonal(&pts);
        let eps = 1e-12 * scale * scale;
        let mut add: Vec<Option<usize>> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if j == i || (j + 1) % n == i {
                    continue;
                }
                let (a, b) = (pts[j], pts[(j + 1) % n]);
                if geometry::segments_cross(&c, &pts[i], &a, &b, eps) {
                    add.push(mesh.he_twin(hs[j]).map(|t| mesh.he_face(t)));
                }
            }
        }
        if add.is_empty() {
            // barycenter sees every vertex but the loop is still not star-shaped
            // (e.g. barycenter outside): grow across edges facing away from it
            for j in 0..n {
                if geometry::orient(&pts[j], &pts[(j + 1) % n], &c) < -eps {
                    add.push(mesh.he_twin(hs[j]).map(|t| mesh.he_face(t)));
                }
            }
        }
        if add.is_empty() || add.iter().any(Option::is_none) {
            return Ok(None);
        }
        for g in add.into_iter().flatten() {
            if !group.contains(&g) {
                group.push(g);
            }
        }
        let Some(hs) = group_boundary(mesh, &group) else { return Ok(None) };
        let pts: Vec<Point> = hs.iter().map(|&h| mesh.vertex(mesh.he_origin(h))).collect();
        if polygon_kernel(&pts).is_star_shaped() {
            group.sort_unstable();
            return Ok(Some((group, round)));
        }
    }
    Ok(None)
}

/// Ear-clipping triangulation of a simple counterclockwise polygon.
pub fn ear_clip(pts: &[Point]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut tris = Vec::new();
    let scale = geometry::bbox_diagonal(pts);
    let eps = 1e-14 * scale * scale;
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (a, b, c) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            if geometry::orient(&pts[a], &pts[b], &pts[c]) <= eps {
                continue;
            }
            let tri = [pts[a], pts[b], pts[c]];
            let blocked = idx.iter().any(|&v| {
                v != a && v != b && v != c && geometry::point_in_polygon(&pts[v], &tri)
            });
            if !blocked {
                tris.push([a, b, c]);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        if !clipped {
            // only degenerate (collinear) corners remain
            let (a, b, c) = (idx[m - 1], idx[0], idx[1]);
            tris.push([a, b, c]);
            idx.remove(0);
        }
    }
    tris.push([idx[0], idx[1], idx[2]]);
    tris
}

/// Triangulates face `f` and regroups the triangles greedily into star-shaped pieces.
fn split_into_star_groups(mesh: &PolyMesh, f: usize) -> Result<PolyMesh> {
    let loop_ = mesh.face(f).to_vec();
    let pts = mesh.face_points(f);
    let tris: Vec<Vec<usize>> = ear_clip(&pts)
        .into_iter()
        .filter(|t| geometry::orient(&pts[t[0]], &pts[t[1]], &pts[t[2]]) > 0.0)
        .map(|t| t.to_vec())
        .collect();
    let local = PolyMesh::new(pts.clone(), tris).map_err(|e| Error::MergeFailed(format!("triangulation: {e}")))?;
    let nt = local.n_faces();
    let mut assigned = vec![false; nt];
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    for seed in 0..nt {
        if assigned[seed] {
            continue;
        }
        assigned[seed] = true;
        let mut group = vec![seed];
        let mut grew = true;
        while grew {
            grew = false;
            for t in 0..nt {
                if assigned[t] || !group.iter().any(|&g| local.faces_share_edge(g, t)) {
                    continue;
                }
                let mut trial = group.clone();
                trial.push(t);
                if let Some(hs) = group_boundary(&local, &trial) {
                    let poly: Vec<Point> = hs.iter().map(|&h| local.vertex(local.he_origin(h))).collect();
                    if polygon_kernel(&poly).is_star_shaped() {
                        group = trial;
                        assigned[t] = true;
                        grew = true;
                    }
                }
            }
        }
        let hs = group_boundary(&local, &group).ok_or_else(|| Error::MergeFailed("regrouping".into()))?;
        pieces.push(hs.iter().map(|&h| loop_[local.he_origin(h)]).collect());
    }
    let mut faces: Vec<Vec<usize>> = Vec::with_capacity(mesh.n_faces() + pieces.len());
    for g in 0..mesh.n_faces() {
        if g != f {
            faces.push(mesh.face(g).to_vec());
        }
    }
    faces.extend(pieces);
    compact(mesh.vertices(), faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pt;
    use crate::preprocess::generate::{cell_id, unit_grid};

    #[test]
    fn merging_two_cells_gives_hexagon() {
        let m = unit_grid(2);
        let out = merge_groups(&m, &[vec![0, 1]]).unwrap();
        assert_eq!(out.n_faces(), 3);
        assert!(out.faces().iter().any(|f| f.len() == 6));
        assert!((out.total_area() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ring_of_cells_is_not_a_disk() {
        let m = unit_grid(3);
        let ring: Vec<usize> = (0..9).filter(|&f| f != 4).collect();
        assert!(group_boundary(&m, &ring).is_none());
    }

    #[test]
    fn convex_polygons_are_untouched() {
        let m = unit_grid(4);
        let m = merge_groups(&m, &[vec![cell_id(4, 1, 1), cell_id(4, 2, 1)]]).unwrap();
        let (out, rep) = make_star_shaped(&m).unwrap();
        assert_eq!(out.faces(), m.faces());
        assert!(rep.iterations.is_empty());
    }

    #[test]
    fn u_shape_is_repaired_by_one_merge() {
        let n = 5;
        let m = unit_grid(n);
        let u: Vec<usize> = [(1, 1), (2, 1), (3, 1), (1, 2), (3, 2)].iter().map(|&(i, j)| cell_id(n, i, j)).collect();
        let m = merge_groups(&m, &[u]).unwrap();
        let before = m.n_faces();
        let (out, rep) = make_star_shaped(&m).unwrap();
        assert_eq!(rep.iterations, vec![1]);
        assert_eq!(out.n_faces(), before - 1);
        let poly = (0..out.n_faces()).find(|&f| !out.is_quad(f)).unwrap();
        let info = polygon_kernel(&out.face_points(poly));
        assert!((geometry::signed_area(&info.kernel) - 6.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn c_shape_is_repaired() {
        let n = 6;
        let m = unit_grid(n);
        let c: Vec<usize> = [(1, 1), (2, 1), (3, 1), (3, 2), (3, 3), (2, 3), (1, 3)]
            .iter()
            .map(|&(i, j)| cell_id(n, i, j))
            .collect();
        let m = merge_groups(&m, &[c]).unwrap();
        let poly = (0..m.n_faces()).find(|&f| !m.is_quad(f)).unwrap();
        assert!(!polygon_kernel(&m.face_points(poly)).is_star_shaped());
        let before = m.n_faces();
        let (out, rep) = make_star_shaped(&m).unwrap();
        assert!(rep.max_iterations() <= 2);
        assert_eq!(out.n_faces(), before - 2);
        for f in 0..out.n_faces() {
            if !out.is_quad(f) {
                assert!(polygon_kernel(&out.face_points(f)).is_star_shaped());
            }
        }
        assert!((out.total_area() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn ear_clip_covers_area() {
        let l = vec![pt(0.0, 0.0), pt(2.0, 0.0), pt(2.0, 1.0), pt(1.0, 1.0), pt(1.0, 2.0), pt(0.0, 2.0)];
        let tris = ear_clip(&l);
        assert_eq!(tris.len(), 4);
        let a: f64 = tris.iter().map(|t| geometry::orient(&l[t[0]], &l[t[1]], &l[t[2]]) * 0.5).sum();
        assert!((a - 3.0).abs() < 1e-14);
    }
}
