use crate::geometry::{self, Point};

/// Visibility kernel of a polygon and the point chosen inside it.
#[derive(Clone, Debug)]
pub struct StarShapeInfo {
    /// Convex kernel polygon (counterclockwise); empty when the polygon is not star-shaped.
    pub kernel: Vec<Point>,
    pub chosen_center: Option<Point>,
}

impl StarShapeInfo {
    pub fn is_star_shaped(&self) -> bool {
        self.chosen_center.is_some()
    }
}

/// Intersects the inward half-planes of all edges of a counterclockwise polygon.
///
/// Kernels with area below `1e-12` of the polygon area count as empty, so a
/// polygon whose kernel degenerates to a point or segment is not star-shaped.
pub fn polygon_kernel(poly: &[Point]) -> StarShapeInfo {
    let n = poly.len();
    let scale = geometry::bbox_diagonal(poly);
    let area = geometry::signed_area(poly).abs();
    let (mut lo, mut hi) = (poly[0], poly[0]);
    for p in poly {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let pad = Point::new(scale, scale);
    let (lo, hi) = (lo - pad, hi + pad);
    let mut kernel = vec![lo, Point::new(hi.x, lo.y), hi, Point::new(lo.x, hi.y)];
    let eps = 1e-12 * scale * scale;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        kernel = clip_left(&kernel, &a, &b, eps);
        if kernel.len() < 3 {
            return StarShapeInfo { kernel: Vec::new(), chosen_center: None };
        }
    }
    let karea = geometry::signed_area(&kernel);
    if karea <= 1e-12 * area {
        return StarShapeInfo { kernel: Vec::new(), chosen_center: None };
    }
    let c = geometry::centroid(&kernel);
    StarShapeInfo { kernel, chosen_center: Some(c) }
}

/// Sutherland-Hodgman step keeping the part left of the directed line a->b.
fn clip_left(poly: &[Point], a: &Point, b: &Point, eps: f64) -> Vec<Point> {
    let n = poly.len();
    let side = |p: &Point| geometry::orient(a, b, p);
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let (sp, sq) = (side(&p), side(&q));
        let p_in = sp >= -eps;
        let q_in = sq >= -eps;
        if p_in {
            out.push(p);
        }
        if p_in != q_in {
            let t = sp / (sp - sq);
            out.push(p + (q - p) * t);
        }
    }
    // drop consecutive duplicates
    out.dedup_by(|x, y| (*x - *y).norm() <= 1e-15);
    if out.len() > 1 && (out[0] - out[out.len() - 1]).norm() <= 1e-15 {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pt;

    #[test]
    fn convex_kernel_is_polygon() {
        let sq = vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
        let info = polygon_kernel(&sq);
        assert!((geometry::signed_area(&info.kernel) - 1.0).abs() < 1e-12);
        assert!((info.chosen_center.unwrap() - pt(0.5, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn collinear_vertices_do_not_shrink_kernel() {
        let sq = vec![pt(0.0, 0.0), pt(0.5, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
        let info = polygon_kernel(&sq);
        assert!((geometry::signed_area(&info.kernel) - 1.0).abs() < 1e-12);
    }
}
