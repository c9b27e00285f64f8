//! Kernel center placement and boundary collocation points.

use crate::error::{Error, Result};
use crate::geometry::{self, Point};

fn outward_normal(a: &Point, b: &Point) -> Point {
    let d = b - a;
    Point::new(d.y, -d.x) / d.norm()
}

fn clear_of(poly: &[Point], z: &Point, min_dist: f64) -> bool {
    let n = poly.len();
    !geometry::point_in_polygon(z, poly) && (0..n).all(|i| geometry::segment_distance(z, &poly[i], &poly[(i + 1) % n]) >= min_dist)
}

/// `per_edge` centers per edge of a counterclockwise polygon: one off each
/// vertex along the outward angle bisector, the others off interior edge points
/// along the edge normal. Offsets are `offset_factor` times the local edge length.
/// A center that lands inside (or too close to) the polygon is retried with a
/// doubled offset; a center closer than a fifth of the local offset to an
/// earlier one (as happens at reflex corners) is dropped.
pub fn place_kernel_centers(poly: &[Point], per_edge: usize, offset_factor: f64) -> Result<Vec<Point>> {
    let n = poly.len();
    let per_edge = per_edge.max(1);
    let mut out = Vec::with_capacity(n * per_edge);
    for i in 0..n {
        let (prev, a, b) = (poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]);
        let (lp, ln) = ((a - prev).norm(), (b - a).norm());
        let n_prev = outward_normal(&prev, &a);
        let n_next = outward_normal(&a, &b);
        let bis = n_prev + n_next;
        let dir = if bis.norm() > 1e-8 { bis.normalize() } else { n_next };
        let mut candidates = vec![(a, dir, 0.5 * (lp + ln))];
        for l in 1..per_edge {
            let t = l as f64 / per_edge as f64;
            candidates.push((a + (b - a) * t, n_next, ln));
        }
        for (base, dir, len) in candidates {
            let mut offset = offset_factor * len;
            let mut placed = None;
            for _ in 0..2 {
                let z = base + dir * offset;
                if clear_of(poly, &z, 0.05 * offset_factor * len) {
                    placed = Some(z);
                    break;
                }
                offset *= 2.0;
            }
            let z = placed.ok_or(Error::CenterInsidePolygon(i))?;
            let sep = 0.2 * offset_factor * len;
            if out.iter().all(|q: &Point| (q - z).norm() >= sep) {
                out.push(z);
            }
        }
    }
    Ok(out)
}

/// A point on edge `edge` (from vertex `edge` to the next one) at fraction `t`.
#[derive(Clone, Copy, Debug)]
pub struct CollocationPoint {
    pub edge: usize,
    pub t: f64,
    pub x: Point,
}

/// `samples_per_edge` equally spaced points per edge including both ends; each
/// vertex is listed once (as the start of its outgoing edge).
pub fn sample_collocation(poly: &[Point], samples_per_edge: usize) -> Vec<CollocationPoint> {
    let n = poly.len();
    let m = samples_per_edge.max(2) - 1;
    let mut out = Vec::with_capacity(n * m);
    for e in 0..n {
        let (a, b) = (poly[e], poly[(e + 1) % n]);
        for k in 0..m {
            let t = k as f64 / m as f64;
            out.push(CollocationPoint { edge: e, t, x: a + (b - a) * t });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pt;

    fn square() -> Vec<Point> {
        vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)]
    }

    #[test]
    fn square_centers_sit_on_diagonals() {
        let c = place_kernel_centers(&square(), 1, 0.5).unwrap();
        assert_eq!(c.len(), 4);
        let s = 0.5 / 2f64.sqrt();
        assert!((c[0] - pt(-s, -s)).norm() < 1e-15);
        assert!((c[2] - pt(1.0 + s, 1.0 + s)).norm() < 1e-15);
    }

    #[test]
    fn collocation_counts() {
        assert_eq!(sample_collocation(&square(), 3).len(), 8);
        assert_eq!(sample_collocation(&square(), 5).len(), 16);
    }

    #[test]
    fn concave_centers_are_outside() {
        let l = vec![pt(0.0, 0.0), pt(2.0, 0.0), pt(2.0, 1.0), pt(1.0, 1.0), pt(1.0, 2.0), pt(0.0, 2.0)];
        let c = place_kernel_centers(&l, 3, 1.0).unwrap();
        assert!(c.len() >= 15);
        for (i, z) in c.iter().enumerate() {
            assert!(!geometry::point_in_polygon(z, &l));
            assert!(c[..i].iter().all(|q| (q - z).norm() > 0.1));
        }
    }
}
