//! Kernel functions centered outside a polygon.

use crate::geometry::Point;

pub trait Kernel: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    /// Value and gradient at offset `r = x - z` (never zero on the polygon).
    fn eval(&self, r: &Point) -> (f64, Point);
}

/// `1 / |x - z|`
#[derive(Clone, Copy, Debug, Default)]
pub struct InverseDistance;

impl Kernel for InverseDistance {
    fn name(&self) -> &'static str {
        "inverse-distance"
    }
    fn eval(&self, r: &Point) -> (f64, Point) {
        let d2 = r.norm_squared();
        let d = d2.sqrt();
        (1.0 / d, -r / (d2 * d))
    }
}

/// `log |x - z|`, harmonic in the plane.
#[derive(Clone, Copy, Debug, Default)]
pub struct LogKernel;

impl Kernel for LogKernel {
    fn name(&self) -> &'static str {
        "log"
    }
    fn eval(&self, r: &Point) -> (f64, Point) {
        let d2 = r.norm_squared();
        (0.5 * d2.ln(), r / d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(k: &dyn Kernel) {
        let r = Point::new(0.7, -1.3);
        let h = 1e-6;
        let (_, g) = k.eval(&r);
        let dx = (k.eval(&(r + Point::new(h, 0.0))).0 - k.eval(&(r - Point::new(h, 0.0))).0) / (2.0 * h);
        let dy = (k.eval(&(r + Point::new(0.0, h))).0 - k.eval(&(r - Point::new(0.0, h))).0) / (2.0 * h);
        assert!((g.x - dx).abs() < 1e-8 && (g.y - dy).abs() < 1e-8);
    }

    #[test]
    fn gradients_match_differences() {
        fd_check(&InverseDistance);
        fd_check(&LogKernel);
    }
}
