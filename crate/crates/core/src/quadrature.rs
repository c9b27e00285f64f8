//! Gauss rules on the unit square, on triangles (collapsed), on segments and on
//! star-shaped polygons (fan of triangles from a kernel point).

use crate::error::{Error, Result};
use crate::geometry::{self, Point};

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss-Legendre rule on [0, 1] exact for polynomials up to `degree`.
pub fn gauss_unit(degree: usize) -> (Vec<f64>, Vec<f64>) {
    let n = (degree + 2) / 2;
    let (x, w) = gauss_legendre(n.max(1));
    (x.iter().map(|t| 0.5 * (t + 1.0)).collect(), w.iter().map(|v| 0.5 * v).collect())
}

/// Tensor Gauss-Legendre rule on [0, 1]^2 with ceil((degree + 1) / 2) points per direction.
pub fn quad_rule_square(degree: usize) -> QuadratureRule {
    let (x, w) = gauss_unit(degree.max(1));
    let mut points = Vec::with_capacity(x.len() * x.len());
    let mut weights = Vec::with_capacity(x.len() * x.len());
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in x.iter().enumerate() {
            points.push(Point::new(*xi, *yj));
            weights.push(w[i] * w[j]);
        }
    }
    QuadratureRule { points, weights, degree }
}

/// Collapsed Gauss rule on triangle (a, b, c), exact up to `degree`.
pub fn quad_rule_triangle(a: &Point, b: &Point, c: &Point, degree: usize) -> QuadratureRule {
    // the collapse adds one degree in the radial direction
    let (s, ws) = gauss_unit(degree + 1);
    let (t, wt) = gauss_unit(degree);
    let area2 = geometry::orient(a, b, c);
    let mut points = Vec::with_capacity(s.len() * t.len());
    let mut weights = Vec::with_capacity(s.len() * t.len());
    for (i, si) in s.iter().enumerate() {
        for (j, tj) in t.iter().enumerate() {
            let p = a * (1.0 - si) + (b * (1.0 - tj) + c * *tj) * *si;
            points.push(p);
            weights.push(ws[i] * wt[j] * si * area2);
        }
    }
    QuadratureRule { points, weights, degree }
}

/// Fan-triangulation rule over a polygon seen entirely from `center`.
pub fn quad_rule_polygon(poly: &[Point], center: &Point, degree: usize) -> Result<QuadratureRule> {
    let n = poly.len();
    let scale = geometry::bbox_diagonal(poly);
    let mut rule = QuadratureRule { points: Vec::new(), weights: Vec::new(), degree };
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let o = geometry::orient(center, &a, &b);
        if o < -1e-12 * scale * scale {
            return Err(Error::NotStarShaped(usize::MAX));
        }
        if o <= 1e-15 * scale * scale {
            continue;
        }
        let t = quad_rule_triangle(center, &a, &b, degree);
        rule.points.extend(t.points);
        rule.weights.extend(t.weights);
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pt;

    #[test]
    fn legendre_small_rules() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
        let (_, w) = gauss_legendre(1);
        assert_eq!(w, vec![2.0]);
    }

    #[test]
    fn midpoint_rule() {
        let r = quad_rule_square(1);
        assert_eq!(r.len(), 1);
        assert!((r.points[0] - pt(0.5, 0.5)).norm() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn square_rule_exactness() {
        let r = quad_rule_square(5);
        assert!((r.integrate(|p| p.x * p.x * p.y * p.y) - 1.0 / 9.0).abs() < 1e-15);
        assert!((r.integrate(|p| p.x.powi(5)) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_rule_exactness() {
        // int over the unit right triangle of x^a y^b = a! b! / (a + b + 2)!
        let r = quad_rule_triangle(&pt(0.0, 0.0), &pt(1.0, 0.0), &pt(0.0, 1.0), 6);
        let fact = |n: u32| (1..=n).product::<u32>() as f64;
        for a in 0..=6u32 {
            for b in 0..=(6 - a) {
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                let got = r.integrate(|p| p.x.powi(a as i32) * p.y.powi(b as i32));
                assert!((got - exact).abs() < 1e-15, "{a} {b}");
            }
        }
    }

    #[test]
    fn polygon_rule_area_and_moment() {
        let sq = vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
        let r = quad_rule_polygon(&sq, &pt(0.5, 0.5), 6).unwrap();
        assert!((r.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((r.integrate(|p| p.x) - 0.5).abs() < 1e-14);
        assert!(quad_rule_polygon(&sq, &pt(2.0, 0.5), 6).is_err());
    }
}
