//! The function set on a polygon: kernels at outside centers plus the six
//! quadratic monomials, all evaluated in a local frame (centroid, radius) so
//! that the columns stay comparable in size on small polygons.

use std::sync::Arc;

use super::kernels::Kernel;
use crate::geometry::Point;

pub const N_MONOMIALS: usize = 6;

/// Monomials 1, x, y, xy, x^2, y^2 and their gradients.
pub fn monomials(p: &Point) -> ([f64; N_MONOMIALS], [Point; N_MONOMIALS]) {
    let (x, y) = (p.x, p.y);
    (
        [1.0, x, y, x * y, x * x, y * y],
        [
            Point::zeros(),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(y, x),
            Point::new(2.0 * x, 0.0),
            Point::new(0.0, 2.0 * y),
        ],
    )
}

#[derive(Clone, Debug)]
pub struct Features {
    pub origin: Point,
    pub radius: f64,
    /// Kernel centers in physical coordinates.
    pub centers: Vec<Point>,
    pub kernel: Arc<dyn Kernel>,
}

impl Features {
    pub fn new(origin: Point, radius: f64, centers: Vec<Point>, kernel: Arc<dyn Kernel>) -> Self {
        Self { origin, radius, centers, kernel }
    }

    pub fn len(&self) -> usize {
        self.centers.len() + N_MONOMIALS
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n_kernels(&self) -> usize {
        self.centers.len()
    }

    pub fn to_local(&self, x: &Point) -> Point {
        (x - self.origin) / self.radius
    }

    /// Values and physical gradients of every feature at `x`: kernels first,
    /// then monomials of the local coordinates.
    pub fn eval(&self, x: &Point, values: &mut [f64], grads: &mut [Point]) {
        let xi = self.to_local(x);
        let inv = 1.0 / self.radius;
        let k = self.centers.len();
        for (i, z) in self.centers.iter().enumerate() {
            let (v, g) = self.kernel.eval(&(xi - self.to_local(z)));
            values[i] = v;
            grads[i] = g * inv;
        }
        let (mv, mg) = monomials(&xi);
        for d in 0..N_MONOMIALS {
            values[k + d] = mv[d];
            grads[k + d] = mg[d] * inv;
        }
    }
}
