//! Mesh generators used by tests and experiments.

use rand::Rng;

use super::merge::{group_boundary, merge_groups};
use super::{uniform_refine, HybridMesh};
use crate::error::{Error, Result};
use crate::geometry::{pt, Mat2, Point};
use crate::mesh::PolyMesh;

pub fn cell_id(n: usize, i: usize, j: usize) -> usize {
    j * n + i
}

/// `nx` by `ny` grid of the rectangle `[lo, hi]`; cell (i, j) has id `j * nx + i`.
pub fn rect_grid(nx: usize, ny: usize, lo: Point, hi: Point) -> PolyMesh {
    let mut vs = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let (u, v) = (i as f64 / nx as f64, j as f64 / ny as f64);
            vs.push(pt(lo.x + u * (hi.x - lo.x), lo.y + v * (hi.y - lo.y)));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut fs = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            fs.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolyMesh::new(vs, fs).expect("grid is valid")
}

pub fn unit_grid(n: usize) -> PolyMesh {
    rect_grid(n, n, pt(0.0, 0.0), pt(1.0, 1.0))
}

/// Image of a mesh under `x -> a x + b`; `a` must have positive determinant.
pub fn affine_image(mesh: &PolyMesh, a: &Mat2, b: &Point) -> Result<PolyMesh> {
    if a.determinant() <= 0.0 {
        return Err(Error::Invalid("affine map must preserve orientation".into()));
    }
    let vs = mesh.vertices().iter().map(|p| a * p + b).collect();
    PolyMesh::new(vs, mesh.faces().to_vec())
}

/// Merges a list of grid cells of an `n`x`n` grid into one polygon.
pub fn merge_cells(mesh: &PolyMesh, n: usize, cells: &[(usize, usize)]) -> Result<PolyMesh> {
    let group: Vec<usize> = cells.iter().map(|&(i, j)| cell_id(n, i, j)).collect();
    merge_groups(mesh, &[group])
}

/// Unit `n`x`n` grid, sheared by `x += shear * y`, with the five cells of the
/// central plus sign merged into a 12-gon.
pub fn grid_with_cross(n: usize, shear: f64) -> Result<PolyMesh> {
    if n < 5 {
        return Err(Error::Invalid("cross mesh needs n >= 5".into()));
    }
    let c = n / 2;
    let grid = unit_grid(n);
    let cross = [(c, c), (c - 1, c), (c + 1, c), (c, c - 1), (c, c + 1)];
    let m = merge_cells(&grid, n, &cross)?;
    let a = Mat2::new(1.0, shear, 0.0, 1.0);
    affine_image(&m, &a, &Point::zeros())
}

/// The hybrid benchmark mesh: an 8x8 grid with a merged cross, uniformly refined
/// `level` times.
pub fn hybrid_mesh(level: usize) -> Result<HybridMesh> {
    let mut hm = HybridMesh::new(grid_with_cross(8, 0.0)?);
    for _ in 0..level {
        hm = uniform_refine(&hm)?;
    }
    Ok(hm)
}

/// Unit grid in which a fraction of interior quads (pairwise non-adjacent, at
/// least one) is marked as polygons, and one vertex of each marked quad is
/// moved along its diagonal by a random fraction in `range` of the diagonal.
pub fn perturbed_marked_grid(n: usize, fraction: f64, range: (f64, f64), rng: &mut impl Rng) -> Result<HybridMesh> {
    let mesh = unit_grid(n);
    if fraction <= 0.0 {
        return Ok(HybridMesh::new(mesh));
    }
    let target = ((fraction * (n * n) as f64).round() as usize).max(1);
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for j in 1..n.saturating_sub(1) {
        for i in 1..n.saturating_sub(1) {
            candidates.push((i, j));
        }
    }
    let mut marked = vec![false; n * n];
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let mut tries = 0;
    while chosen.len() < target && !candidates.is_empty() && tries < 100 * n * n {
        tries += 1;
        let k = rng.random_range(0..candidates.len());
        let (i, j) = candidates[k];
        // keep marked cells two apart so their one-rings never overlap
        if chosen.iter().any(|&(a, b)| a.abs_diff(i) <= 2 && b.abs_diff(j) <= 2) {
            candidates.swap_remove(k);
            continue;
        }
        chosen.push((i, j));
        marked[cell_id(n, i, j)] = true;
        candidates.swap_remove(k);
    }
    let (mut vs, fs) = mesh.into_parts();
    for &(i, j) in &chosen {
        let f = &fs[cell_id(n, i, j)];
        let corner = rng.random_range(0..4);
        let t = rng.random_range(range.0..=range.1);
        let (v, w) = (f[corner], f[(corner + 2) % 4]);
        vs[v] = vs[v] + (vs[w] - vs[v]) * t;
    }
    Ok(HybridMesh::with_marks(PolyMesh::new(vs, fs)?, &marked))
}

/// Random polyomino merges on jittered grids; the raw input for preprocessing.
pub fn random_polyomino_mesh(rng: &mut impl Rng) -> Result<PolyMesh> {
    let n = rng.random_range(6..=10);
    let mut mesh = unit_grid(n);
    if rng.random_bool(0.5) {
        let h = 1.0 / n as f64;
        let (mut vs, fs) = mesh.into_parts();
        for j in 1..n {
            for i in 1..n {
                let v = j * (n + 1) + i;
                vs[v] += Point::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2)) * h;
            }
        }
        mesh = PolyMesh::new(vs, fs)?;
    }
    let mut owner = vec![false; n * n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let n_groups = rng.random_range(1..=3);
    for _ in 0..n_groups {
        let size = rng.random_range(2..=8);
        let start = (rng.random_range(0..n), rng.random_range(0..n));
        if owner[cell_id(n, start.0, start.1)] {
            continue;
        }
        let mut cells = vec![start];
        for _ in 0..10 * size {
            if cells.len() >= size {
                break;
            }
            let &(i, j) = &cells[rng.random_range(0..cells.len())];
            let (di, dj) = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)][rng.random_range(0..4)];
            let (a, b) = (i as i64 + di, j as i64 + dj);
            if a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                continue;
            }
            let c = (a as usize, b as usize);
            if !cells.contains(&c) && !owner[cell_id(n, c.0, c.1)] {
                cells.push(c);
            }
        }
        let ids: Vec<usize> = cells.iter().map(|&(i, j)| cell_id(n, i, j)).collect();
        if group_boundary(&mesh, &ids).is_none() {
            continue;
        }
        for &f in &ids {
            owner[f] = true;
        }
        groups.push(ids);
    }
    merge_groups(&mesh, &groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cross_is_twelve_gon() {
        let m = grid_with_cross(8, 0.0).unwrap();
        assert_eq!(m.n_faces(), 60);
        let polys: Vec<usize> = (0..m.n_faces()).filter(|&f| !m.is_quad(f)).collect();
        assert_eq!(polys.len(), 1);
        assert_eq!(m.arity(polys[0]), 12);
        assert!((m.total_area() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn marked_grid_has_separated_polygons() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let hm = perturbed_marked_grid(16, 0.05, (0.2, 0.4), &mut rng).unwrap();
        assert!(hm.polygons().count() >= 1);
        assert!(hm.separation_violations().is_empty());
    }

    #[test]
    fn zero_fraction_is_plain_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let hm = perturbed_marked_grid(4, 0.0, (0.2, 0.4), &mut rng).unwrap();
        assert_eq!(hm.mesh.vertices(), unit_grid(4).vertices());
        assert_eq!(hm.polygons().count(), 0);
    }
}
