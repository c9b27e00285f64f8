//! Nonconforming bases on polygons: kernel functions centered outside the
//! polygon plus quadratic monomials, fitted by constrained least squares to the
//! traces of the neighboring conforming functions.

pub mod centers;
pub mod constraints;
pub mod features;
pub mod fit;
pub mod kernels;

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

pub use centers::{place_kernel_centers, sample_collocation, CollocationPoint};
pub use constraints::{constraint_rows, poisson_fields, ConstraintMode, LinearField};
pub use features::{Features, N_MONOMIALS};
pub use fit::constrained_lsq;
pub use kernels::{InverseDistance, Kernel, LogKernel};

use crate::bases::{ElementBasis, LocalKind};
use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use crate::preprocess::polygon_kernel;
use crate::quadrature::{quad_rule_polygon, QuadratureRule};

#[derive(Clone, Debug)]
pub struct PolyOptions {
    pub samples_per_edge: usize,
    pub offset_factor: f64,
    pub constraints: ConstraintMode,
    pub kernel: Arc<dyn Kernel>,
    pub quad_degree: usize,
    /// Centers per edge; chosen automatically from the dof count when `None`.
    pub centers_per_edge: Option<usize>,
}

impl Default for PolyOptions {
    fn default() -> Self {
        Self {
            samples_per_edge: 10,
            offset_factor: 1.0,
            constraints: ConstraintMode::Quadratic,
            kernel: Arc::new(InverseDistance),
            quad_degree: 6,
            centers_per_edge: None,
        }
    }
}

/// Everything about a polygon that does not depend on the dofs being fitted.
#[derive(Clone, Debug)]
pub struct PolySetup {
    pub cell: usize,
    pub points: Vec<Point>,
    pub star_center: Point,
    pub rule: QuadratureRule,
    pub features: Features,
    pub collocation: Vec<CollocationPoint>,
}

impl PolySetup {
    /// `min_kernels` is the lower bound on the number of centers (typically the
    /// larger of the dof count and the PDE's minimum).
    pub fn new(cell: usize, points: Vec<Point>, opts: &PolyOptions, min_kernels: usize) -> Result<Self> {
        let info = polygon_kernel(&points);
        let star_center = info.chosen_center.ok_or(Error::NotStarShaped(cell))?;
        let rule = quad_rule_polygon(&points, &star_center, opts.quad_degree).map_err(|_| Error::NotStarShaped(cell))?;
        let n = points.len();
        let mut per_edge = opts.centers_per_edge.unwrap_or_else(|| min_kernels.div_ceil(n).max(1));
        let mut centers = place_kernel_centers(&points, per_edge, opts.offset_factor).map_err(|_| Error::CenterInsidePolygon(cell))?;
        // coincident centers are dropped, so add more per edge until enough remain
        while opts.centers_per_edge.is_none() && centers.len() < min_kernels && per_edge < 16 {
            per_edge += 1;
            centers = place_kernel_centers(&points, per_edge, opts.offset_factor).map_err(|_| Error::CenterInsidePolygon(cell))?;
        }
        let origin = geometry::centroid(&points);
        let radius = points.iter().map(|p| (p - origin).norm()).fold(0.0, f64::max);
        let features = Features::new(origin, radius, centers, opts.kernel.clone());
        let collocation = sample_collocation(&points, opts.samples_per_edge);
        if collocation.len() < features.len() {
            return Err(Error::RankDeficient(format!(
                "polygon {cell}: {} collocation points for {} unknowns",
                collocation.len(),
                features.len()
            )));
        }
        Ok(Self { cell, points, star_center, rule, features, collocation })
    }

    /// Feature values at the collocation points.
    pub fn collocation_matrix(&self) -> DMatrix<f64> {
        let n = self.features.len();
        let mut a = DMatrix::zeros(self.collocation.len(), n);
        let mut v = vec![0.0; n];
        let mut g = vec![Point::zeros(); n];
        for (i, c) in self.collocation.iter().enumerate() {
            self.features.eval(&c.x, &mut v, &mut g);
            for k in 0..n {
                a[(i, k)] = v[k];
            }
        }
        a
    }
}

/// Fitted polygon functions: `phi_{globals[j]} = sum_k coeffs[(k, j)] F_k`.
#[derive(Clone, Debug)]
pub struct PolyBasis {
    pub setup: PolySetup,
    pub globals: Vec<usize>,
    pub coeffs: DMatrix<f64>,
    pub constraint_rank: usize,
    pub condition: f64,
    /// Largest constraint violation after the fit.
    pub constraint_residual: f64,
}

/// One fitted function in plain form (local frame: `xi = (x - origin) / radius`).
#[derive(Clone, Debug, Serialize)]
pub struct HarmonicBasisRep {
    pub polygon: usize,
    pub dof: usize,
    pub origin: [f64; 2],
    pub radius: f64,
    pub kernel: String,
    pub centers: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// Coefficients of 1, x, y, xy, x^2, y^2 in the local frame.
    pub poly: [f64; N_MONOMIALS],
}

impl PolyBasis {
    /// Fits the functions of `globals` given their traces at the collocation
    /// points (`traces`, one column per dof), the constraint fields and the
    /// constraint right-hand sides (`rhs`, one row per field).
    pub fn fit(setup: PolySetup, globals: Vec<usize>, traces: &DMatrix<f64>, fields: &[LinearField], rhs: &DMatrix<f64>) -> Result<Self> {
        let a = setup.collocation_matrix();
        let c = constraint_rows(fields, &setup.features, &setup.rule);
        let fit = constrained_lsq(&a, traces, &c, rhs).map_err(|e| match e {
            Error::RankDeficient(s) => Error::RankDeficient(format!("polygon {}: {s}", setup.cell)),
            e => e,
        })?;
        let resid = (&c * &fit.solution - rhs).amax();
        let scale = 1.0 + rhs.amax();
        Ok(Self {
            setup,
            globals,
            coeffs: fit.solution,
            constraint_rank: fit.constraint_rank,
            condition: fit.condition,
            constraint_residual: resid / scale,
        })
    }

    pub fn element(&self) -> ElementBasis {
        ElementBasis { cell: self.setup.cell, kind: LocalKind::Polygon, globals: self.globals.clone(), transform: self.coeffs.clone() }
    }

    /// Values and gradients of the fitted functions (in `globals` order) at `x`.
    pub fn eval(&self, x: &Point, values: &mut Vec<f64>, grads: &mut Vec<Point>) {
        let n = self.setup.features.len();
        let mut fv = vec![0.0; n];
        let mut fg = vec![Point::zeros(); n];
        self.setup.features.eval(x, &mut fv, &mut fg);
        values.clear();
        grads.clear();
        for j in 0..self.globals.len() {
            let col = self.coeffs.column(j);
            let mut v = 0.0;
            let mut g = Point::zeros();
            for k in 0..n {
                v += col[k] * fv[k];
                g += fg[k] * col[k];
            }
            values.push(v);
            grads.push(g);
        }
    }

    pub fn rep(&self, j: usize) -> HarmonicBasisRep {
        let f = &self.setup.features;
        let k = f.n_kernels();
        let col = self.coeffs.column(j);
        let mut poly = [0.0; N_MONOMIALS];
        for d in 0..N_MONOMIALS {
            poly[d] = col[k + d];
        }
        HarmonicBasisRep {
            polygon: self.setup.cell,
            dof: self.globals[j],
            origin: [f.origin.x, f.origin.y],
            radius: f.radius,
            kernel: f.kernel.name().to_string(),
            centers: f.centers.iter().map(|z| [z.x, z.y]).collect(),
            weights: (0..k).map(|i| col[i]).collect(),
            poly,
        }
    }
}
