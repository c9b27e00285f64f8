//! Discrete function spaces on hybrid meshes and the strategies that build them.

use std::collections::BTreeMap;
use std::fmt::Debug;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::bases::{build_quad_bases, DofKind, DofTable, ElementBasis};
use crate::error::{Error, Result};
use crate::geomap::{distorted_cells, validate_geomap, GeoMap};
use crate::geometry::{Mat2, Point};
use crate::mesh::{CellClass, PolyMesh};
use crate::pde::Pde;
use crate::poly::{ConstraintMode, PolyBasis, PolyOptions, PolySetup};
use crate::preprocess::HybridMesh;
use crate::quadrature::{quad_rule_polygon, quad_rule_square};

/// Rule degree and relative determinant bound used to screen spline maps.
const GEOMAP_CHECK_DEGREE: usize = 6;
const MIN_DET_RATIO: f64 = 0.1;

pub const CORNERS: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];

/// Values and physical gradients of a cell's global functions at one point.
#[derive(Clone, Debug)]
pub struct PointEval {
    pub x: Point,
    pub det: f64,
    pub values: Vec<f64>,
    pub grads: Vec<Point>,
}

/// Builds a [`Space`] from a hybrid mesh.
pub trait Discretization: Send + Sync + Debug {
    fn name(&self) -> &'static str;
    fn lagrange_order(&self) -> usize;
    fn splines(&self) -> bool;
    /// Strongest polygon constraints that make sense for this space.
    fn max_constraints(&self) -> ConstraintMode {
        ConstraintMode::Quadratic
    }
    fn build(&self, hm: &HybridMesh, pde: &dyn Pde, opts: &PolyOptions) -> Result<Space> {
        let mut o = opts.clone();
        o.constraints = o.constraints.min(self.max_constraints());
        Space::build(hm, self.lagrange_order(), self.splines(), pde, &o)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Q1;
#[derive(Clone, Copy, Debug, Default)]
pub struct Q2;
/// Splines on regular quads, Q2 elsewhere, fitted bases on polygons.
#[derive(Clone, Copy, Debug, Default)]
pub struct PolySpline;

impl Discretization for Q1 {
    fn name(&self) -> &'static str {
        "q1"
    }
    fn lagrange_order(&self) -> usize {
        1
    }
    fn splines(&self) -> bool {
        false
    }
    fn max_constraints(&self) -> ConstraintMode {
        ConstraintMode::Linear
    }
}

impl Discretization for Q2 {
    fn name(&self) -> &'static str {
        "q2"
    }
    fn lagrange_order(&self) -> usize {
        2
    }
    fn splines(&self) -> bool {
        false
    }
}

impl Discretization for PolySpline {
    fn name(&self) -> &'static str {
        "polyspline"
    }
    fn lagrange_order(&self) -> usize {
        2
    }
    fn splines(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug)]
pub struct Space {
    pub mesh: PolyMesh,
    pub polygon: Vec<bool>,
    pub classes: Vec<CellClass>,
    pub dofs: DofTable,
    /// Quad elements (`None` on polygons).
    pub quads: Vec<Option<ElementBasis>>,
    pub geomap: GeoMap,
    /// Fitted polygon bases (`None` on quads).
    pub polys: Vec<Option<PolyBasis>>,
    pub order: usize,
    pub constraints: ConstraintMode,
}

impl Space {
    pub fn build(hm: &HybridMesh, order: usize, splines: bool, pde: &dyn Pde, opts: &PolyOptions) -> Result<Self> {
        let mesh = hm.mesh.clone();
        let mut classes = hm.classify()?;
        let is_poly = |f: usize| hm.polygon[f];
        // spline cells whose fitted map folds or nearly folds fall back to Q2,
        // together with the spline cells around a distorted coupled Q2 cell
        let (dofs, quads, geomap) = loop {
            let (dofs, quads) = build_quad_bases(&mesh, &classes, order, splines, &is_poly)?;
            let geomap = GeoMap::fit(&mesh, &classes, &dofs, &quads)?;
            let bad = distorted_cells(&geomap, &quads, GEOMAP_CHECK_DEGREE, MIN_DET_RATIO);
            let mut changed = false;
            for &f in &bad {
                let mut demote = vec![f];
                demote.extend(mesh.one_ring(f));
                for g in demote {
                    if classes[g] == CellClass::SplineCompatible {
                        classes[g] = CellClass::Q2Quad;
                        changed = true;
                    }
                }
            }
            if !changed {
                let report = validate_geomap(&geomap, &quads, GEOMAP_CHECK_DEGREE);
                if let Some(&cell) = report.nonpositive_cells.first() {
                    return Err(Error::DegenerateJacobian { cell, det: report.min_det });
                }
                break (dofs, quads, geomap);
            }
        };
        let nf = mesh.n_faces();
        let mut space = Self {
            mesh,
            polygon: hm.polygon.clone(),
            classes,
            dofs,
            quads,
            geomap,
            polys: vec![None; nf],
            order,
            constraints: opts.constraints,
        };
        let polygons: Vec<usize> = hm.polygons().collect();
        let fitted: Vec<PolyBasis> = polygons.par_iter().map(|&p| space.fit_polygon(p, pde, opts)).collect::<Result<_>>()?;
        for (p, b) in polygons.into_iter().zip(fitted) {
            space.polys[p] = Some(b);
        }
        Ok(space)
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.len()
    }

    pub fn n_cells(&self) -> usize {
        self.mesh.n_faces()
    }

    pub fn is_polygon(&self, f: usize) -> bool {
        self.polygon[f]
    }

    /// Global dofs whose functions live on cell `f`, in evaluation order.
    pub fn globals(&self, f: usize) -> &[usize] {
        match (&self.quads[f], &self.polys[f]) {
            (Some(el), _) => &el.globals,
            (None, Some(p)) => &p.globals,
            _ => &[],
        }
    }

    /// Evaluation at a parametric point of a quad cell.
    pub fn eval_param(&self, f: usize, xh: &Point) -> Result<PointEval> {
        let el = self.quads[f].as_ref().ok_or_else(|| Error::Invalid(format!("cell {f} is not a quad element")))?;
        let (mut lv, mut lg) = (Vec::with_capacity(9), Vec::with_capacity(9));
        el.eval_local(xh, &mut lv, &mut lg);
        let map = self.geomap.eval_with(f, &lv, &lg)?;
        let pg: Vec<Point> = lg.iter().map(|g| map.inv_t * g).collect();
        let n = el.globals.len();
        let mut values = vec![0.0; n];
        let mut grads = vec![Point::zeros(); n];
        let t = &el.transform;
        for l in 0..lv.len() {
            for k in 0..n {
                let w = t[(l, k)];
                if w != 0.0 {
                    values[k] += w * lv[l];
                    grads[k] += pg[l] * w;
                }
            }
        }
        Ok(PointEval { x: map.x, det: map.det, values, grads })
    }

    /// Evaluation at a physical point of a polygon cell.
    pub fn eval_physical(&self, f: usize, x: &Point) -> Result<PointEval> {
        let p = self.polys[f].as_ref().ok_or_else(|| Error::Invalid(format!("cell {f} has no polygon basis")))?;
        let (mut values, mut grads) = (Vec::new(), Vec::new());
        p.eval(x, &mut values, &mut grads);
        Ok(PointEval { x: *x, det: 1.0, values, grads })
    }

    /// `p` is parametric on quads and physical on polygons.
    pub fn eval_at(&self, f: usize, p: &Point) -> Result<PointEval> {
        if self.quads[f].is_some() {
            self.eval_param(f, p)
        } else {
            self.eval_physical(f, p)
        }
    }

    /// Quadrature points of a cell (in the coordinates `eval_at` expects) with
    /// weights in the parametric measure; multiply by `det` for physical ones.
    pub fn integration_points(&self, f: usize, degree: usize) -> Result<Vec<(Point, f64)>> {
        if self.quads[f].is_some() {
            let r = quad_rule_square(degree);
            Ok(r.points.into_iter().zip(r.weights).collect())
        } else {
            let p = self.polys[f].as_ref().ok_or_else(|| Error::Invalid(format!("cell {f} has no basis")))?;
            let r = if degree == p.setup.rule.degree {
                p.setup.rule.clone()
            } else {
                quad_rule_polygon(&p.setup.points, &p.setup.star_center, degree)?
            };
            Ok(r.points.into_iter().zip(r.weights).collect())
        }
    }

    /// Calls `visit(eval, physical weight)` at every quadrature point of `f`.
    pub fn integrate_cell(&self, f: usize, degree: usize, mut visit: impl FnMut(&PointEval, f64)) -> Result<()> {
        for (p, w) in self.integration_points(f, degree)? {
            let e = self.eval_at(f, &p)?;
            visit(&e, w * e.det.abs());
        }
        Ok(())
    }

    /// Point at fraction `t` along local edge `i` of cell `f`, in `eval_at` coordinates.
    pub fn edge_point(&self, f: usize, i: usize, t: f64) -> Point {
        if self.quads[f].is_some() {
            let (a, b) = (CORNERS[i], CORNERS[(i + 1) % 4]);
            Point::new(a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
        } else {
            let pts = self.mesh.face_points(f);
            pts[i] + (pts[(i + 1) % pts.len()] - pts[i]) * t
        }
    }

    /// Arc-length factor of local edge `i` of `f` at an evaluated point.
    pub fn edge_speed(&self, f: usize, i: usize, xh: &Point) -> Result<f64> {
        if self.quads[f].is_some() {
            let (a, b) = (CORNERS[i], CORNERS[(i + 1) % 4]);
            let t = Point::new(b.0 - a.0, b.1 - a.1);
            let map = self.geomap.eval(f, self.quads[f].as_ref(), xh)?;
            Ok((map.jacobian * t).norm())
        } else {
            let pts = self.mesh.face_points(f);
            Ok((pts[(i + 1) % pts.len()] - pts[i]).norm())
        }
    }

    /// An `n`x`n` grid of sample points per quad; a fan of barycentric samples on polygons.
    pub fn sample_points(&self, f: usize, n: usize) -> Vec<Point> {
        let s = (n.max(2) - 1) as f64;
        let mut out = Vec::new();
        if self.quads[f].is_some() {
            for i in 0..n {
                for j in 0..n {
                    out.push(Point::new(i as f64 / s, j as f64 / s));
                }
            }
        } else if let Some(p) = &self.polys[f] {
            let pts = &p.setup.points;
            let c = p.setup.star_center;
            for k in 0..pts.len() {
                let (a, b) = (pts[k], pts[(k + 1) % pts.len()]);
                for i in 1..n {
                    for j in 0..n {
                        let (r, t) = (i as f64 / s, j as f64 / s);
                        out.push(c + ((a * (1.0 - t) + b * t) - c) * r);
                    }
                }
            }
            out.push(c);
        }
        out
    }

    fn fit_polygon(&self, p: usize, pde: &dyn Pde, opts: &PolyOptions) -> Result<PolyBasis> {
        let mesh = &self.mesh;
        let boundary_dofs = mesh.face(p).iter().filter(|&&v| self.dofs.get(DofKind::NodeVertex(v)).is_some()).count()
            + mesh.face_edges(p).iter().filter(|&&e| self.dofs.get(DofKind::NodeEdge(e)).is_some()).count();
        let min_k = pde.min_kernels().max(boundary_dofs);
        let setup = PolySetup::new(p, mesh.face_points(p), opts, min_k)?;

        // traces of the neighbors' functions at the collocation points
        let mut columns: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        let s = setup.collocation.len();
        for (row, c) in setup.collocation.iter().enumerate() {
            let h = mesh.halfedge(p, c.edge);
            let twin = mesh.he_twin(h).ok_or(Error::SeparationViolated(p))?;
            let g = mesh.he_face(twin);
            if self.quads[g].is_none() {
                return Err(Error::SeparationViolated(p));
            }
            let xh = self.edge_point(g, mesh.he_local(twin), 1.0 - c.t);
            let e = self.eval_param(g, &xh)?;
            for (k, &d) in self.quads[g].as_ref().unwrap().globals.iter().enumerate() {
                if e.values[k].abs() > 1e-13 {
                    columns.entry(d).or_insert_with(|| vec![0.0; s])[row] = e.values[k];
                }
            }
        }
        let globals: Vec<usize> = columns.keys().copied().collect();
        let traces = DMatrix::from_fn(s, globals.len(), |i, j| columns[&globals[j]][i]);
        let col_of: BTreeMap<usize, usize> = globals.iter().enumerate().map(|(j, &d)| (d, j)).collect();

        // consistency right-hand sides from every other cell touching these dofs
        let f = &setup.features;
        let fields = pde.constraint_fields(self.constraints, &f.origin, f.radius);
        let mut rhs = DMatrix::zeros(fields.len(), globals.len());
        if !fields.is_empty() {
            for t in mesh.one_ring(p) {
                if t == p || self.quads[t].is_none() {
                    continue;
                }
                let cols: Vec<(usize, usize)> =
                    self.globals(t).iter().enumerate().filter_map(|(k, d)| col_of.get(d).map(|&j| (k, j))).collect();
                if cols.is_empty() {
                    continue;
                }
                self.integrate_cell(t, opts.quad_degree, |e, w| {
                    for (r, v) in fields.iter().enumerate() {
                        let (div, vx) = (v.div(), v.at(&e.x));
                        for &(k, j) in &cols {
                            rhs[(r, j)] -= w * (div * e.values[k] + vx.dot(&e.grads[k]));
                        }
                    }
                })?;
            }
        }
        PolyBasis::fit(setup, globals, &traces, &fields, &rhs)
    }

    /// Metric data of the geometric map at a parametric point (identity on polygons).
    pub fn jacobian(&self, f: usize, p: &Point) -> Result<Mat2> {
        Ok(self.geomap.eval(f, self.quads[f].as_ref(), p)?.jacobian)
    }
}
