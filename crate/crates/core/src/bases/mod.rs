//! Local bases on quad cells, the global dof table and local-to-global rows.

pub mod bspline;
pub mod lagrange;

pub use bspline::{bspline_quad_eval, SplineBasis1D};
pub use lagrange::lagrange_basis;

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::{classify::local_grid, CellClass, LocalGrid, OneRingEntity, PolyMesh};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DofKind {
    SplineFace(usize),
    SplineEdge(usize),
    SplineVertex(usize),
    NodeVertex(usize),
    NodeEdge(usize),
    NodeCell(usize),
}

impl DofKind {
    pub fn is_spline(&self) -> bool {
        matches!(self, DofKind::SplineFace(_) | DofKind::SplineEdge(_) | DofKind::SplineVertex(_))
    }
}

#[derive(Clone, Debug)]
pub struct DofRecord {
    pub kind: DofKind,
    pub anchor: Point,
    pub boundary: bool,
}

#[derive(Clone, Debug, Default)]
pub struct DofTable {
    pub dofs: Vec<DofRecord>,
    index: HashMap<DofKind, usize>,
}

impl DofTable {
    pub fn len(&self) -> usize {
        self.dofs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }
    pub fn get(&self, kind: DofKind) -> Option<usize> {
        self.index.get(&kind).copied()
    }
    fn insert(&mut self, kind: DofKind, anchor: Point, boundary: bool) -> usize {
        if let Some(&i) = self.index.get(&kind) {
            return i;
        }
        let i = self.dofs.len();
        self.dofs.push(DofRecord { kind, anchor, boundary });
        self.index.insert(kind, i);
        i
    }
    pub fn count_spline(&self) -> usize {
        self.dofs.iter().filter(|d| d.kind.is_spline()).count()
    }
}

#[derive(Clone, Debug)]
pub enum LocalKind {
    Spline { u: [SplineBasis1D; 3], v: [SplineBasis1D; 3] },
    Lagrange { order: usize },
    Polygon,
}

/// Local functions of one cell and the dense map from the global dofs it
/// touches to those functions: local function `l` equals
/// `sum_k transform[(l, k)] * phi_{globals[k]}`.
#[derive(Clone, Debug)]
pub struct ElementBasis {
    pub cell: usize,
    pub kind: LocalKind,
    pub globals: Vec<usize>,
    pub transform: DMatrix<f64>,
}

impl ElementBasis {
    pub fn n_local(&self) -> usize {
        self.transform.nrows()
    }

    /// Parametric values and gradients of the local functions (quad cells only).
    pub fn eval_local(&self, x: &Point, values: &mut Vec<f64>, grads: &mut Vec<Point>) {
        match &self.kind {
            LocalKind::Spline { u, v } => {
                let bu = bspline::eval_cell(u, x.x);
                let bv = bspline::eval_cell(v, x.y);
                values.clear();
                grads.clear();
                for a in 0..3 {
                    for b in 0..3 {
                        values.push(bu[a].0 * bv[b].0);
                        grads.push(Point::new(bu[a].1 * bv[b].0, bu[a].0 * bv[b].1));
                    }
                }
            }
            LocalKind::Lagrange { order } => lagrange_basis(*order, x, values, grads),
            LocalKind::Polygon => panic!("polygon elements are evaluated in physical space"),
        }
    }

    /// Weight of global dof `g` in every local function, as (local, weight) pairs.
    pub fn rows(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.n_local())
            .map(|l| {
                self.globals
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| self.transform[(l, *k)] != 0.0)
                    .map(|(k, &g)| (g, self.transform[(l, k)]))
                    .collect()
            })
            .collect()
    }
}

// stencil offset (a, b) -> entity of a quad, for nodes of Lagrange cells
fn node_entity(mesh: &PolyMesh, f: usize, a: usize, b: usize) -> OneRingEntity {
    match (a, b) {
        (0, 0) => OneRingEntity::Vertex(mesh.face(f)[0]),
        (2, 0) => OneRingEntity::Vertex(mesh.face(f)[1]),
        (2, 2) => OneRingEntity::Vertex(mesh.face(f)[2]),
        (0, 2) => OneRingEntity::Vertex(mesh.face(f)[3]),
        (1, 0) => OneRingEntity::Edge(mesh.face_edge(f, 0)),
        (2, 1) => OneRingEntity::Edge(mesh.face_edge(f, 1)),
        (1, 2) => OneRingEntity::Edge(mesh.face_edge(f, 2)),
        (0, 1) => OneRingEntity::Edge(mesh.face_edge(f, 3)),
        _ => OneRingEntity::Face(f),
    }
}

// parametric location of corner i and of the midpoint of local edge i
const CORNER_PARAM: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
const EDGE_PARAM: [(f64, f64); 4] = [(0.5, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 0.5)];

fn spline_element(mesh: &PolyMesh, f: usize, grid: &LocalGrid, dofs: &DofTable) -> ElementBasis {
    let [u0, u1, v0, v1] = grid.boundary;
    let mut globals = Vec::with_capacity(9);
    for a in 0..3 {
        for b in 0..3 {
            let kind = match grid.entities[a][b] {
                OneRingEntity::Face(g) => DofKind::SplineFace(g),
                OneRingEntity::Edge(e) => DofKind::SplineEdge(e),
                OneRingEntity::Vertex(v) => DofKind::SplineVertex(v),
            };
            globals.push(dofs.get(kind).expect("spline dof registered"));
        }
    }
    let _ = mesh;
    ElementBasis {
        cell: f,
        kind: LocalKind::Spline { u: bspline::cell_functions(u0, u1), v: bspline::cell_functions(v0, v1) },
        globals,
        transform: DMatrix::identity(9, 9),
    }
}

/// Global dofs and quad-cell element bases for one discretization.
///
/// `order` is the Lagrange order used on non-spline quads; with `splines` set,
/// spline-compatible cells get biquadratic B-splines and Lagrange nodes on their
/// vertices and edges are expressed through the spline dofs.
pub fn build_quad_bases(
    mesh: &PolyMesh,
    classes: &[CellClass],
    order: usize,
    splines: bool,
    is_polygon: &dyn Fn(usize) -> bool,
) -> Result<(DofTable, Vec<Option<ElementBasis>>)> {
    let nf = mesh.n_faces();
    let mut dofs = DofTable::default();
    let mut grids: Vec<Option<LocalGrid>> = vec![None; nf];
    if splines {
        for f in 0..nf {
            if classes[f] != CellClass::SplineCompatible {
                continue;
            }
            let grid = local_grid(mesh, f, is_polygon).ok_or(Error::NotCompatible(f))?;
            for a in 0..3 {
                for b in 0..3 {
                    match grid.entities[a][b] {
                        OneRingEntity::Face(g) => {
                            let c = crate::geometry::vertex_average(&mesh.face_points(g));
                            dofs.insert(DofKind::SplineFace(g), c, false)
                        }
                        OneRingEntity::Edge(e) => {
                            let [p, q] = mesh.edge(e).verts;
                            dofs.insert(DofKind::SplineEdge(e), (mesh.vertex(p) + mesh.vertex(q)) * 0.5, true)
                        }
                        OneRingEntity::Vertex(v) => dofs.insert(DofKind::SplineVertex(v), mesh.vertex(v), true),
                    };
                }
            }
            grids[f] = Some(grid);
        }
    }
    // a spline cell containing each vertex / edge, with the local index there
    let mut vertex_owner: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut edge_owner: HashMap<usize, (usize, usize)> = HashMap::new();
    for f in 0..nf {
        if grids[f].is_some() {
            for i in 0..4 {
                vertex_owner.entry(mesh.face(f)[i]).or_insert((f, i));
                edge_owner.entry(mesh.face_edge(f, i)).or_insert((f, i));
            }
        }
    }

    let mut elements: Vec<Option<ElementBasis>> = vec![None; nf];
    for f in 0..nf {
        if let Some(g) = &grids[f] {
            elements[f] = Some(spline_element(mesh, f, g, &dofs));
        }
    }

    let (mut vals, mut grads) = (Vec::new(), Vec::new());
    for f in 0..nf {
        if classes[f] == CellClass::Polygon || grids[f].is_some() {
            continue;
        }
        let n = order + 1;
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (i * 2 / order, j * 2 / order);
                let entity = node_entity(mesh, f, a, b);
                let owner = match entity {
                    OneRingEntity::Vertex(v) => vertex_owner.get(&v).map(|&(s, k)| (s, CORNER_PARAM[k])),
                    OneRingEntity::Edge(e) => edge_owner.get(&e).map(|&(s, k)| (s, EDGE_PARAM[k])),
                    OneRingEntity::Face(_) => None,
                };
                let row = match owner {
                    Some((s, (pu, pv))) => {
                        let el = elements[s].as_ref().unwrap();
                        el.eval_local(&Point::new(pu, pv), &mut vals, &mut grads);
                        vals.iter()
                            .zip(&el.globals)
                            .filter(|(w, _)| w.abs() > 1e-15)
                            .map(|(w, &g)| (g, *w))
                            .collect()
                    }
                    None => {
                        let (kind, anchor, boundary) = match entity {
                            OneRingEntity::Vertex(v) => (DofKind::NodeVertex(v), mesh.vertex(v), mesh.vertex_on_boundary(v)),
                            OneRingEntity::Edge(e) => {
                                let [p, q] = mesh.edge(e).verts;
                                (DofKind::NodeEdge(e), (mesh.vertex(p) + mesh.vertex(q)) * 0.5, mesh.edge_is_boundary(e))
                            }
                            OneRingEntity::Face(g) => {
                                (DofKind::NodeCell(g), crate::geometry::vertex_average(&mesh.face_points(g)), false)
                            }
                        };
                        vec![(dofs.insert(kind, anchor, boundary), 1.0)]
                    }
                };
                rows.push(row);
            }
        }
        elements[f] = Some(from_rows(f, LocalKind::Lagrange { order }, &rows));
    }
    Ok((dofs, elements))
}

/// Packs sparse local-to-global rows into an element.
pub fn from_rows(cell: usize, kind: LocalKind, rows: &[Vec<(usize, f64)>]) -> ElementBasis {
    let mut globals: Vec<usize> = rows.iter().flatten().map(|&(g, _)| g).collect();
    globals.sort_unstable();
    globals.dedup();
    let mut t = DMatrix::zeros(rows.len(), globals.len());
    for (l, row) in rows.iter().enumerate() {
        for &(g, w) in row {
            let k = globals.binary_search(&g).unwrap();
            t[(l, k)] += w;
        }
    }
    ElementBasis { cell, kind, globals, transform: t }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::classify_cells;
    use crate::preprocess::generate::unit_grid;

    #[test]
    fn dof_counts_on_grid() {
        for n in [2, 3, 5] {
            let m = unit_grid(n);
            let c = classify_cells(&m, &|_| false).unwrap();
            let (d, _) = build_quad_bases(&m, &c, 2, true, &|_| false).unwrap();
            assert_eq!(d.len(), (n + 2) * (n + 2));
            let (d, _) = build_quad_bases(&m, &c, 2, false, &|_| false).unwrap();
            assert_eq!(d.len(), (2 * n + 1) * (2 * n + 1));
            let (d, _) = build_quad_bases(&m, &c, 1, false, &|_| false).unwrap();
            assert_eq!(d.len(), (n + 1) * (n + 1));
        }
    }

    #[test]
    fn interior_spline_center_values() {
        let m = unit_grid(5);
        let c = classify_cells(&m, &|_| false).unwrap();
        let (_, els) = build_quad_bases(&m, &c, 2, true, &|_| false).unwrap();
        let el = els[12].as_ref().unwrap();
        let (mut v, mut g) = (Vec::new(), Vec::new());
        el.eval_local(&Point::new(0.5, 0.5), &mut v, &mut g);
        assert!((v[4] - 0.5625).abs() < 1e-15);
        assert!((v[1] - 0.09375).abs() < 1e-15);
        assert!((v[0] - 0.015625).abs() < 1e-15);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
