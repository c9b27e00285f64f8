//! Boundary conditions: least-squares Dirichlet fit and Neumann loads.

use std::collections::BTreeMap;

use crate::discretization::Space;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::problem::{Neumann, Problem};
use crate::quadrature::gauss_unit;
use crate::solver::{solve_spd, CsrMatrix};

/// Samples per boundary edge for the Dirichlet fit.
pub const DIRICHLET_SAMPLES: usize = 7;

/// Boundary edges as (edge, cell, local index), with a flag telling whether
/// the edge lies in the Neumann region.
pub fn boundary_edges(space: &Space, neumann: Option<&Neumann>) -> Result<Vec<(usize, usize, usize, bool)>> {
    let mesh = &space.mesh;
    let mut out = Vec::new();
    for e in mesh.boundary_edges() {
        let h = mesh.edge(e).halfedges[0];
        let (f, i) = (mesh.he_face(h), mesh.he_local(h));
        let is_n = match neumann {
            Some(n) => {
                let x = space.eval_at(f, &space.edge_point(f, i, 0.5))?.x;
                (n.region)(&x)
            }
            None => false,
        };
        out.push((e, f, i, is_n));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct DirichletFit {
    /// (vector dof, value) pairs.
    pub values: Vec<(usize, f64)>,
    /// Largest sample misfit.
    pub max_residual: f64,
}

/// Least-squares fit of the Dirichlet data over the traces of all functions
/// that do not vanish on Dirichlet edges.
pub fn dirichlet_fit(space: &Space, problem: &Problem, r: usize) -> Result<DirichletFit> {
    let edges = boundary_edges(space, problem.neumann.as_ref())?;
    let mut cols: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut data: Vec<[f64; 2]> = Vec::new();
    for &(_, f, i, is_n) in &edges {
        if is_n {
            continue;
        }
        let g = space.globals(f);
        for k in 0..DIRICHLET_SAMPLES {
            let t = k as f64 / (DIRICHLET_SAMPLES - 1) as f64;
            let e = space.eval_at(f, &space.edge_point(f, i, t))?;
            let row: Vec<(usize, f64)> = e
                .values
                .iter()
                .zip(g)
                .filter(|(v, _)| v.abs() > 1e-13)
                .map(|(v, &d)| {
                    let n = cols.len();
                    (*cols.entry(d).or_insert(n), *v)
                })
                .collect();
            rows.push(row);
            data.push((problem.dirichlet)(&e.x));
        }
    }
    let m = cols.len();
    if m == 0 {
        return Ok(DirichletFit { values: Vec::new(), max_residual: 0.0 });
    }
    let mut trips = Vec::new();
    for row in &rows {
        for &(a, va) in row {
            for &(b, vb) in row {
                trips.push((a, b, va * vb));
            }
        }
    }
    let ata = CsrMatrix::from_triplets(m, m, trips);
    let mut values = Vec::with_capacity(r * m);
    let mut max_residual = 0.0f64;
    let mut sol = vec![vec![0.0; m]; r];
    for (a, s) in sol.iter_mut().enumerate() {
        let mut rhs = vec![0.0; m];
        for (row, d) in rows.iter().zip(&data) {
            for &(c, v) in row {
                rhs[c] += v * d[a];
            }
        }
        *s = solve_spd(&ata, &rhs).map_err(|_| Error::RankDeficient("Dirichlet fit".into()))?;
        for (row, d) in rows.iter().zip(&data) {
            let fit: f64 = row.iter().map(|&(c, v)| v * s[c]).sum();
            max_residual = max_residual.max((fit - d[a]).abs());
        }
    }
    for (&d, &c) in &cols {
        for (a, s) in sol.iter().enumerate() {
            values.push((r * d + a, s[c]));
        }
    }
    values.sort_by_key(|&(d, _)| d);
    Ok(DirichletFit { values, max_residual })
}

/// Adds `int_{Neumann} phi_i . n(x) ds` to `b`.
pub fn apply_neumann(space: &Space, neumann: &Neumann, r: usize, b: &mut [f64]) -> Result<()> {
    let (ts, ws) = gauss_unit(2 * space.order + 4);
    for (_, f, i, is_n) in boundary_edges(space, Some(neumann))? {
        if !is_n {
            continue;
        }
        let g = space.globals(f);
        for (t, w) in ts.iter().zip(&ws) {
            let p = space.edge_point(f, i, *t);
            let e = space.eval_at(f, &p)?;
            let speed = space.edge_speed(f, i, &p)?;
            let normal = outward_normal(space, f, i, &p)?;
            let tr = (neumann.traction)(&e.x, &normal);
            for (k, v) in e.values.iter().enumerate() {
                for a in 0..r {
                    b[r * g[k] + a] += w * speed * v * tr[a];
                }
            }
        }
    }
    Ok(())
}

fn outward_normal(space: &Space, f: usize, i: usize, p: &Point) -> Result<Point> {
    let tangent = if space.quads[f].is_some() {
        let (a, b) = (crate::discretization::CORNERS[i], crate::discretization::CORNERS[(i + 1) % 4]);
        space.jacobian(f, p)? * Point::new(b.0 - a.0, b.1 - a.1)
    } else {
        let pts = space.mesh.face_points(f);
        pts[(i + 1) % pts.len()] - pts[i]
    };
    Ok(Point::new(tangent.y, -tangent.x).normalize())
}
