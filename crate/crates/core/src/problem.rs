//! Boundary value problems: PDE, source, boundary data and (optionally) the
//! exact solution for error measurement.

use std::fmt::Debug;
use std::sync::Arc;

use crate::geometry::{Mat2, Point};
use crate::pde::Pde;

/// A smooth field with up to two components.
pub trait ExactSolution: Send + Sync + Debug {
    fn value(&self, x: &Point) -> [f64; 2];
    fn grad(&self, x: &Point) -> [Point; 2];
    fn hessian(&self, x: &Point) -> [Mat2; 2];
}

pub type VectorFn = Arc<dyn Fn(&Point) -> [f64; 2] + Send + Sync>;
pub type RegionFn = Arc<dyn Fn(&Point) -> bool + Send + Sync>;
/// Traction given the point and the outward unit normal.
pub type TractionFn = Arc<dyn Fn(&Point, &Point) -> [f64; 2] + Send + Sync>;

#[derive(Clone)]
pub struct Neumann {
    /// Boundary edges whose midpoint satisfies this predicate are Neumann edges.
    pub region: RegionFn,
    pub traction: TractionFn,
}

#[derive(Clone)]
pub struct Problem {
    pub pde: Arc<dyn Pde>,
    pub source: VectorFn,
    pub dirichlet: VectorFn,
    pub neumann: Option<Neumann>,
    pub exact: Option<Arc<dyn ExactSolution>>,
}

impl Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("pde", &self.pde)
            .field("neumann", &self.neumann.is_some())
            .field("exact", &self.exact)
            .finish()
    }
}

impl Problem {
    /// Source and Dirichlet data derived from a known solution.
    pub fn manufactured(pde: Arc<dyn Pde>, exact: Arc<dyn ExactSolution>) -> Self {
        let (p, e) = (pde.clone(), exact.clone());
        let source: VectorFn = Arc::new(move |x| p.source_from_hessians(&e.hessian(x)));
        let e = exact.clone();
        let dirichlet: VectorFn = Arc::new(move |x| e.value(x));
        Self { pde, source, dirichlet, neumann: None, exact: Some(exact) }
    }

    /// Replaces Dirichlet data by the exact flux on the edges selected by `region`.
    pub fn with_neumann(mut self, region: RegionFn) -> Self {
        let exact = self.exact.clone().expect("Neumann data from the exact solution");
        let pde = self.pde.clone();
        let traction: TractionFn = Arc::new(move |x, n| {
            let s = pde.flux(&exact.grad(x));
            [s[0].dot(n), s[1].dot(n)]
        });
        self.neumann = Some(Neumann { region, traction });
        self
    }
}

/// `c + b.x + x^T H x / 2` per component.
#[derive(Clone, Copy, Debug)]
pub struct QuadraticField {
    pub c: [f64; 2],
    pub b: [Point; 2],
    pub h: [Mat2; 2],
}

impl QuadraticField {
    /// `a00 + a10 x + a01 y + a11 xy + a20 x^2 + a02 y^2` as a scalar field.
    pub fn scalar(a: [f64; 6]) -> Self {
        let h = Mat2::new(2.0 * a[4], a[3], a[3], 2.0 * a[5]);
        Self { c: [a[0], 0.0], b: [Point::new(a[1], a[2]), Point::zeros()], h: [h, Mat2::zeros()] }
    }
    pub fn vector(a: [f64; 6], b: [f64; 6]) -> Self {
        let (p, q) = (Self::scalar(a), Self::scalar(b));
        Self { c: [p.c[0], q.c[0]], b: [p.b[0], q.b[0]], h: [p.h[0], q.h[0]] }
    }
}

impl ExactSolution for QuadraticField {
    fn value(&self, x: &Point) -> [f64; 2] {
        let f = |k: usize| self.c[k] + self.b[k].dot(x) + 0.5 * x.dot(&(self.h[k] * x));
        [f(0), f(1)]
    }
    fn grad(&self, x: &Point) -> [Point; 2] {
        [self.b[0] + self.h[0] * x, self.b[1] + self.h[1] * x]
    }
    fn hessian(&self, _: &Point) -> [Mat2; 2] {
        self.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::Poisson;

    #[test]
    fn quadratic_field_derivatives() {
        let q = QuadraticField::scalar([2.0, 1.0, 0.0, 1.0, 1.0, -1.0]);
        let x = Point::new(0.3, -0.7);
        let u = |p: &Point| p.x * p.x + p.x * p.y - p.y * p.y + p.x + 2.0;
        assert!((q.value(&x)[0] - u(&x)).abs() < 1e-15);
        let g = q.grad(&x)[0];
        assert!((g - Point::new(2.0 * x.x + x.y + 1.0, x.x - 2.0 * x.y)).norm() < 1e-15);
        let p = Problem::manufactured(Arc::new(Poisson), Arc::new(q));
        // -lap = -(2 - 2) = 0
        assert!((p.source)(&x)[0].abs() < 1e-15);
    }
}
