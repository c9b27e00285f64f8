//! Consistency constraints on polygon coefficients.
//!
//! For a vector field `V` the identity `int_O (div V phi + V . grad phi) = 0`
//! holds for any `phi` vanishing on the outer boundary; splitting the domain
//! into the polygon and the rest gives one linear row in the polygon
//! coefficients per field, with the right-hand side integrated outside.
//! Poisson uses `V = grad q` for the nonconstant quadratic monomials `q`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::features::Features;
use crate::geometry::{Mat2, Point};
use crate::quadrature::QuadratureRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintMode {
    None,
    Linear,
    #[default]
    Quadratic,
}

impl std::str::FromStr for ConstraintMode {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "linear" => Ok(Self::Linear),
            "quadratic" => Ok(Self::Quadratic),
            _ => Err(crate::Error::UnknownStrategy { kind: "constraint mode", name: s.into() }),
        }
    }
}

/// `V(x) = b + M x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearField {
    pub b: Point,
    pub m: Mat2,
}

impl LinearField {
    pub fn constant(b: Point) -> Self {
        Self { b, m: Mat2::zeros() }
    }
    pub fn at(&self, x: &Point) -> Point {
        self.b + self.m * x
    }
    pub fn div(&self) -> f64 {
        self.m.trace()
    }
    /// The same field written around `origin` with a scaled argument:
    /// `V(x) = W((x - origin) / radius)`.
    pub fn in_frame(b_local: Point, m_local: Mat2, origin: &Point, radius: f64) -> Self {
        let m = m_local / radius;
        Self { b: b_local - m * origin, m }
    }
}

/// Gradients `g + H xi` (with respect to the local coordinate `xi`) of the
/// nonconstant local monomials allowed by `mode`: x, y, then xy, x^2, y^2.
pub fn monomial_gradients(mode: ConstraintMode) -> Vec<(Point, Mat2)> {
    let mut out = Vec::new();
    if mode == ConstraintMode::None {
        return out;
    }
    out.push((Point::new(1.0, 0.0), Mat2::zeros()));
    out.push((Point::new(0.0, 1.0), Mat2::zeros()));
    if mode == ConstraintMode::Quadratic {
        out.push((Point::zeros(), Mat2::new(0.0, 1.0, 1.0, 0.0)));
        out.push((Point::zeros(), Mat2::new(2.0, 0.0, 0.0, 0.0)));
        out.push((Point::zeros(), Mat2::new(0.0, 0.0, 0.0, 2.0)));
    }
    out
}

/// Gradients of the local monomials as physical fields.
pub fn poisson_fields(mode: ConstraintMode, origin: &Point, radius: f64) -> Vec<LinearField> {
    monomial_gradients(mode)
        .into_iter()
        .map(|(g, h)| LinearField::in_frame(g / radius, h / radius, origin, radius))
        .collect()
}

/// Rows `int_P (div V F_k + V . grad F_k)` for every field and feature.
pub fn constraint_rows(fields: &[LinearField], features: &Features, rule: &QuadratureRule) -> DMatrix<f64> {
    let n = features.len();
    let mut c = DMatrix::zeros(fields.len(), n);
    let mut vals = vec![0.0; n];
    let mut grads = vec![Point::zeros(); n];
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        features.eval(p, &mut vals, &mut grads);
        for (r, f) in fields.iter().enumerate() {
            let v = f.at(p);
            let d = f.div();
            for k in 0..n {
                c[(r, k)] += w * (d * vals[k] + v.dot(&grads[k]));
            }
        }
    }
    c
}

/// Explicit Poisson rows for the monomials x, y, xy, x^2, y^2 with features
/// using global monomials (frame origin 0, radius 1): kernel columns are the
/// integrals of `d psi/dx`, `d psi/dy`, `y d psi/dx + x d psi/dy`,
/// `2 (psi + x d psi/dx)`, `2 (psi + y d psi/dy)`; monomial columns are moments.
pub fn poisson_rows_closed_form(features: &Features, rule: &QuadratureRule) -> DMatrix<f64> {
    let k = features.n_kernels();
    let n = features.len();
    let mut c = DMatrix::zeros(5, n);
    let mut vals = vec![0.0; n];
    let mut grads = vec![Point::zeros(); n];
    let mut mom = [0.0f64; 6]; // |P|, x, y, xy, x^2, y^2
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        features.eval(p, &mut vals, &mut grads);
        let (x, y) = (p.x, p.y);
        for i in 0..k {
            let (psi, g) = (vals[i], grads[i]);
            c[(0, i)] += w * g.x;
            c[(1, i)] += w * g.y;
            c[(2, i)] += w * (y * g.x + x * g.y);
            c[(3, i)] += w * 2.0 * (psi + x * g.x);
            c[(4, i)] += w * 2.0 * (psi + y * g.y);
        }
        for (m, v) in mom.iter_mut().zip([1.0, x, y, x * y, x * x, y * y]) {
            *m += w * v;
        }
    }
    let [area, mx, my, mxy, mxx, myy] = mom;
    // columns a00, a10, a01, a11, a20, a02
    let rows = [
        [0.0, area, 0.0, my, 2.0 * mx, 0.0],
        [0.0, 0.0, area, mx, 0.0, 2.0 * my],
        [0.0, my, mx, mxx + myy, 2.0 * mxy, 2.0 * mxy],
        [2.0 * area, 4.0 * mx, 2.0 * my, 4.0 * mxy, 6.0 * mxx, 2.0 * myy],
        [2.0 * area, 2.0 * mx, 4.0 * my, 4.0 * mxy, 2.0 * mxx, 6.0 * myy],
    ];
    for (r, row) in rows.iter().enumerate() {
        for d in 0..6 {
            c[(r, k + d)] = row[d];
        }
    }
    c
}
