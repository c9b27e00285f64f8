//! Planar predicates and polygon measures shared across the crate.

use nalgebra::{Matrix2, Vector2};

pub type Point = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;

#[inline]
pub fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

#[inline]
pub fn cross(a: &Point, b: &Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Twice the signed area of triangle (a, b, c); positive for counterclockwise.
#[inline]
pub fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    cross(&(b - a), &(c - a))
}

pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| cross(&poly[i], &poly[(i + 1) % n])).sum::<f64>() * 0.5
}

/// Area centroid; falls back to the vertex average for degenerate loops.
pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let a = signed_area(poly);
    if a.abs() < 1e-300 {
        return vertex_average(poly);
    }
    let mut c = Point::zeros();
    for i in 0..n {
        let p = &poly[i];
        let q = &poly[(i + 1) % n];
        c += (p + q) * cross(p, q);
    }
    c / (6.0 * a)
}

pub fn vertex_average(poly: &[Point]) -> Point {
    poly.iter().fold(Point::zeros(), |acc, p| acc + p) / poly.len() as f64
}

pub fn bbox_diagonal(poly: &[Point]) -> f64 {
    let (mut lo, mut hi) = (poly[0], poly[0]);
    for p in poly {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

pub fn perimeter(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| (poly[(i + 1) % n] - poly[i]).norm()).sum()
}

/// Distance from `p` to the segment [a, b].
pub fn segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let d = b - a;
    let l2 = d.norm_squared();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&d) / l2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// Even-odd point-in-polygon test; points on the boundary count as inside.
pub fn point_in_polygon(p: &Point, poly: &[Point]) -> bool {
    let n = poly.len();
    let scale = bbox_diagonal(poly).max(1e-300);
    for i in 0..n {
        if segment_distance(p, &poly[i], &poly[(i + 1) % n]) <= 1e-12 * scale {
            return true;
        }
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Proper intersection of the open segments (a, b) and (c, d): they cross at a
/// single point interior to both.
pub fn segments_cross(a: &Point, b: &Point, c: &Point, d: &Point, eps: f64) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
}

/// Whether `p` lies on segment (a, b) strictly between its endpoints.
pub fn point_on_open_segment(p: &Point, a: &Point, b: &Point, eps: f64) -> bool {
    let d = b - a;
    let l = d.norm();
    if l == 0.0 {
        return false;
    }
    let t = (p - a).dot(&d) / (l * l);
    t > eps && t < 1.0 - eps && orient(a, b, p).abs() <= eps * l * l
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point> {
        vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)]
    }

    #[test]
    fn square_measures() {
        let sq = square();
        assert_eq!(signed_area(&sq), 1.0);
        assert!((centroid(&sq) - pt(0.5, 0.5)).norm() < 1e-15);
        assert_eq!(perimeter(&sq), 4.0);
    }

    #[test]
    fn inside_outside() {
        let sq = square();
        assert!(point_in_polygon(&pt(0.5, 0.5), &sq));
        assert!(point_in_polygon(&pt(1.0, 0.5), &sq));
        assert!(!point_in_polygon(&pt(1.5, 0.5), &sq));
        assert!(!point_in_polygon(&pt(-0.1, -0.1), &sq));
    }

    #[test]
    fn crossing_segments() {
        let eps = 1e-12;
        assert!(segments_cross(&pt(0.0, 0.0), &pt(1.0, 1.0), &pt(0.0, 1.0), &pt(1.0, 0.0), eps));
        // touching at an endpoint is not a proper crossing
        assert!(!segments_cross(&pt(0.0, 0.0), &pt(1.0, 1.0), &pt(1.0, 1.0), &pt(2.0, 0.0), eps));
    }
}
