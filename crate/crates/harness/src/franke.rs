//! Franke's 2D test function with closed-form derivatives.

use polyspline::geometry::{Mat2, Point};
use polyspline::problem::ExactSolution;

// c * exp(-a (9x - p)^2 - b (9y - s)^2 - g (9y - t))
struct Term {
    c: f64,
    a: f64,
    p: f64,
    b: f64,
    s: f64,
    g: f64,
    t: f64,
}

const TERMS: [Term; 4] = [
    Term { c: 0.75, a: 0.25, p: 2.0, b: 0.25, s: 2.0, g: 0.0, t: 0.0 },
    Term { c: 0.75, a: 1.0 / 49.0, p: -1.0, b: 0.0, s: 0.0, g: 0.1, t: -1.0 },
    Term { c: 0.5, a: 0.25, p: 7.0, b: 0.25, s: 3.0, g: 0.0, t: 0.0 },
    Term { c: -0.2, a: 1.0, p: 4.0, b: 1.0, s: 7.0, g: 0.0, t: 0.0 },
];

/// Value, gradient and Hessian at `(x, y)`.
pub fn franke_2d(x: f64, y: f64) -> (f64, Point, Mat2) {
    let mut v = 0.0;
    let mut g = Point::zeros();
    let mut h = Mat2::zeros();
    for t in &TERMS {
        let (u, w) = (9.0 * x - t.p, 9.0 * y - t.s);
        let e = t.c * (-t.a * u * u - t.b * w * w - t.g * (9.0 * y - t.t)).exp();
        let dq = Point::new(-18.0 * t.a * u, -18.0 * t.b * w - 9.0 * t.g);
        let hq = Mat2::new(-162.0 * t.a, 0.0, 0.0, -162.0 * t.b);
        v += e;
        g += dq * e;
        h += (dq * dq.transpose() + hq) * e;
    }
    (v, g, h)
}

pub fn franke_laplacian(x: f64, y: f64) -> f64 {
    franke_2d(x, y).2.trace()
}

/// Scalar Franke solution.
#[derive(Clone, Copy, Debug, Default)]
pub struct Franke;

impl ExactSolution for Franke {
    fn value(&self, x: &Point) -> [f64; 2] {
        [franke_2d(x.x, x.y).0, 0.0]
    }
    fn grad(&self, x: &Point) -> [Point; 2] {
        [franke_2d(x.x, x.y).1, Point::zeros()]
    }
    fn hessian(&self, x: &Point) -> [Mat2; 2] {
        [franke_2d(x.x, x.y).2, Mat2::zeros()]
    }
}

/// Displacement `(f(x, y), f(y, x))` for elasticity tests.
#[derive(Clone, Copy, Debug, Default)]
pub struct FrankeVector;

impl ExactSolution for FrankeVector {
    fn value(&self, x: &Point) -> [f64; 2] {
        [franke_2d(x.x, x.y).0, franke_2d(x.y, x.x).0]
    }
    fn grad(&self, x: &Point) -> [Point; 2] {
        let g = franke_2d(x.y, x.x).1;
        [franke_2d(x.x, x.y).1, Point::new(g.y, g.x)]
    }
    fn hessian(&self, x: &Point) -> [Mat2; 2] {
        let h = franke_2d(x.y, x.x).2;
        [franke_2d(x.x, x.y).2, Mat2::new(h[(1, 1)], h[(1, 0)], h[(0, 1)], h[(0, 0)])]
    }
}
