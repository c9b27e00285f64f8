//! Geometric map from parametric cells to physical space.
//!
//! Quad cells are mapped isoparametrically: `g = sum_l phi_l(x^) c_l` with one
//! coefficient point per global dof. Spline coefficients start at Greville-like
//! anchors and receive the least-norm correction that makes `g` interpolate the
//! mesh vertices; Lagrange coefficients are node positions of the bilinear map,
//! except on nodes coupled to splines, which follow the spline map. Polygons
//! use the identity.

use serde::Serialize;

use crate::bases::{DofTable, ElementBasis, LocalKind};
use crate::error::{Error, Result};
use crate::geometry::{Mat2, Point};
use crate::mesh::{CellClass, PolyMesh};
use crate::quadrature::quad_rule_square;
use crate::solver::{conjugate_gradient, CsrMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MapKind {
    Spline,
    Bilinear,
    Quadratic,
    Identity,
}

#[derive(Clone, Copy, Debug)]
pub struct GeoMapEval {
    pub x: Point,
    pub jacobian: Mat2,
    pub det: f64,
    /// `Dg^-1 Dg^-T`
    pub metric: Mat2,
    /// `Dg^-T`, maps parametric gradients to physical ones.
    pub inv_t: Mat2,
}

#[derive(Clone, Debug)]
pub struct GeoMap {
    pub kinds: Vec<MapKind>,
    /// Coefficient point of every global dof.
    pub coeffs: Vec<Point>,
    local: Vec<Vec<Point>>,
}

fn bilinear(c: &[Point], u: f64, v: f64) -> Point {
    c[0] * ((1.0 - u) * (1.0 - v)) + c[1] * (u * (1.0 - v)) + c[2] * (u * v) + c[3] * ((1.0 - u) * v)
}

impl GeoMap {
    /// Builds the map for the given dofs and quad elements (`None` for polygons).
    pub fn fit(mesh: &PolyMesh, classes: &[CellClass], dofs: &DofTable, elements: &[Option<ElementBasis>]) -> Result<Self> {
        let mut coeffs: Vec<Point> = dofs.dofs.iter().map(|d| d.anchor).collect();
        // Lagrange nodes: positions under the bilinear map of a containing cell
        for f in 0..mesh.n_faces() {
            let Some(el) = &elements[f] else { continue };
            let LocalKind::Lagrange { order } = el.kind else { continue };
            let corners = mesh.face_points(f);
            for (l, row) in el.rows().iter().enumerate() {
                if let [(g, w)] = row[..] {
                    if w == 1.0 && !dofs.dofs[g].kind.is_spline() {
                        let p = crate::bases::lagrange::node_position(order, l);
                        coeffs[g] = bilinear(&corners, p.x, p.y);
                    }
                }
            }
        }
        fit_spline_part(mesh, classes, dofs, elements, &mut coeffs)?;

        let mut kinds = Vec::with_capacity(mesh.n_faces());
        let mut local = Vec::with_capacity(mesh.n_faces());
        for f in 0..mesh.n_faces() {
            match &elements[f] {
                None => {
                    kinds.push(MapKind::Identity);
                    local.push(Vec::new());
                }
                Some(el) => {
                    let pts: Vec<Point> = (0..el.n_local())
                        .map(|l| {
                            el.globals.iter().enumerate().fold(Point::zeros(), |acc, (k, &g)| acc + coeffs[g] * el.transform[(l, k)])
                        })
                        .collect();
                    let kind = match el.kind {
                        LocalKind::Spline { .. } => MapKind::Spline,
                        _ if el.globals.iter().any(|&g| dofs.dofs[g].kind.is_spline()) => MapKind::Quadratic,
                        _ => MapKind::Bilinear,
                    };
                    kinds.push(kind);
                    local.push(pts);
                }
            }
        }
        Ok(Self { kinds, coeffs, local })
    }

    /// Local coefficient points of a quad cell.
    pub fn local_coeffs(&self, cell: usize) -> &[Point] {
        &self.local[cell]
    }

    /// Map data at `xh` given the local basis values and parametric gradients there.
    pub fn eval_with(&self, cell: usize, values: &[f64], grads: &[Point]) -> Result<GeoMapEval> {
        let c = &self.local[cell];
        let mut x = Point::zeros();
        let mut j = Mat2::zeros();
        for l in 0..c.len() {
            x += c[l] * values[l];
            j += c[l] * grads[l].transpose();
        }
        let det = j.determinant();
        if det.abs() < 1e-14 {
            return Err(Error::DegenerateJacobian { cell, det });
        }
        let inv = j.try_inverse().ok_or(Error::DegenerateJacobian { cell, det })?;
        Ok(GeoMapEval { x, jacobian: j, det, metric: inv * inv.transpose(), inv_t: inv.transpose() })
    }

    pub fn eval(&self, cell: usize, element: Option<&ElementBasis>, xh: &Point) -> Result<GeoMapEval> {
        match element {
            None => Ok(GeoMapEval { x: *xh, jacobian: Mat2::identity(), det: 1.0, metric: Mat2::identity(), inv_t: Mat2::identity() }),
            Some(el) => {
                let (mut v, mut g) = (Vec::new(), Vec::new());
                el.eval_local(xh, &mut v, &mut g);
                self.eval_with(cell, &v, &g)
            }
        }
    }
}

/// Least-norm correction of the spline coefficients so that every vertex of a
/// spline cell is interpolated.
fn fit_spline_part(
    mesh: &PolyMesh,
    classes: &[CellClass],
    dofs: &DofTable,
    elements: &[Option<ElementBasis>],
    coeffs: &mut [Point],
) -> Result<()> {
    let corners = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
    let mut row_of_vertex = vec![usize::MAX; mesh.n_vertices()];
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut targets: Vec<Point> = Vec::new();
    let (mut v, mut g) = (Vec::new(), Vec::new());
    for f in 0..mesh.n_faces() {
        if classes[f] != CellClass::SplineCompatible {
            continue;
        }
        let Some(el) = &elements[f] else { continue };
        if !matches!(el.kind, LocalKind::Spline { .. }) {
            continue;
        }
        for (i, &vert) in mesh.face(f).iter().enumerate() {
            if row_of_vertex[vert] != usize::MAX {
                continue;
            }
            el.eval_local(&corners[i], &mut v, &mut g);
            let row: Vec<(usize, f64)> = v.iter().zip(&el.globals).filter(|(w, _)| w.abs() > 1e-15).map(|(w, &d)| (d, *w)).collect();
            row_of_vertex[vert] = rows.len();
            rows.push(row);
            targets.push(mesh.vertex(vert));
        }
    }
    if rows.is_empty() {
        return Ok(());
    }
    let scale = mesh.max_edge_length();
    let resid: Vec<Point> = rows
        .iter()
        .zip(&targets)
        .map(|(row, t)| t - row.iter().fold(Point::zeros(), |acc, &(d, w)| acc + coeffs[d] * w))
        .collect();
    let worst = resid.iter().fold(0.0f64, |m, r| m.max(r.norm()));
    if worst <= 1e-14 * scale {
        return Ok(());
    }
    // A A^T assembled explicitly; rows are vertices, columns spline dofs
    let mut rows_of_dof: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dofs.len()];
    for (r, row) in rows.iter().enumerate() {
        for &(d, w) in row {
            rows_of_dof[d].push((r, w));
        }
    }
    let mut trips = Vec::new();
    for list in &rows_of_dof {
        for &(r, wr) in list {
            for &(s, ws) in list {
                trips.push((r, s, wr * ws));
            }
        }
    }
    let aat = CsrMatrix::from_triplets(rows.len(), rows.len(), trips);
    let precond: Vec<f64> = aat.diagonal().iter().map(|d| if *d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    for comp in 0..2 {
        let b: Vec<f64> = resid.iter().map(|r| r[comp]).collect();
        let apply = |y: &[f64], out: &mut [f64]| aat.mul_vec_into(y, out);
        let (y, _) = conjugate_gradient(apply, &precond, &b, 1e-14, 20 * rows.len() + 100).map_err(|_| Error::SingularFit)?;
        for (r, row) in rows.iter().enumerate() {
            for &(d, w) in row {
                coeffs[d][comp] += w * y[r];
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct GeoMapReport {
    pub min_det: f64,
    pub nonpositive_cells: Vec<usize>,
}

/// Evaluates det Dg at the quadrature points of every quad cell.
pub fn validate_geomap(map: &GeoMap, elements: &[Option<ElementBasis>], degree: usize) -> GeoMapReport {
    let rule = quad_rule_square(degree);
    let mut min_det = f64::INFINITY;
    let mut bad = Vec::new();
    let (mut v, mut g) = (Vec::new(), Vec::new());
    for (f, el) in elements.iter().enumerate() {
        let Some(el) = el else { continue };
        let mut cell_min = f64::INFINITY;
        for p in &rule.points {
            el.eval_local(p, &mut v, &mut g);
            let c = &map.local[f];
            let mut j = Mat2::zeros();
            for l in 0..c.len() {
                j += c[l] * g[l].transpose();
            }
            cell_min = cell_min.min(j.determinant());
        }
        if cell_min <= 0.0 {
            bad.push(f);
        }
        min_det = min_det.min(cell_min);
    }
    GeoMapReport { min_det, nonpositive_cells: bad }
}

/// Quad cells whose Jacobian determinant drops below `ratio` times the cell's
/// mean determinant (its area) somewhere on a tensor rule of `degree`.
pub fn distorted_cells(map: &GeoMap, elements: &[Option<ElementBasis>], degree: usize, ratio: f64) -> Vec<usize> {
    let rule = quad_rule_square(degree);
    let (mut v, mut g) = (Vec::new(), Vec::new());
    let mut out = Vec::new();
    for (f, el) in elements.iter().enumerate() {
        let Some(el) = el else { continue };
        let c = &map.local[f];
        let (mut lo, mut area) = (f64::INFINITY, 0.0);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            el.eval_local(p, &mut v, &mut g);
            let j = (0..c.len()).fold(Mat2::zeros(), |acc, l| acc + c[l] * g[l].transpose());
            let d = j.determinant();
            lo = lo.min(d);
            area += w * d;
        }
        if lo <= ratio * area.abs() {
            out.push(f);
        }
    }
    out
}
