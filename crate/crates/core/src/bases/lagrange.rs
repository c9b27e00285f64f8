//! Tensor-product Lagrange functions on [0, 1]^2.
//!
//! Local node `(i, j)` sits at `(i / p, j / p)` and has index `(p + 1) * i + j`.

use crate::geometry::Point;

/// 1D values and derivatives for order 1 (2 functions) or 2 (3 functions).
pub fn lagrange_1d(order: usize, t: f64) -> ([f64; 3], [f64; 3]) {
    match order {
        1 => ([1.0 - t, t, 0.0], [-1.0, 1.0, 0.0]),
        2 => (
            [(1.0 - t) * (1.0 - 2.0 * t), 4.0 * t * (1.0 - t), t * (2.0 * t - 1.0)],
            [4.0 * t - 3.0, 4.0 - 8.0 * t, 4.0 * t - 1.0],
        ),
        _ => panic!("unsupported Lagrange order {order}"),
    }
}

/// Values and parametric gradients of all `(order + 1)^2` functions at `x`.
pub fn lagrange_basis(order: usize, x: &Point, values: &mut Vec<f64>, grads: &mut Vec<Point>) {
    let n = order + 1;
    let (vu, du) = lagrange_1d(order, x.x);
    let (vv, dv) = lagrange_1d(order, x.y);
    values.clear();
    grads.clear();
    for i in 0..n {
        for j in 0..n {
            values.push(vu[i] * vv[j]);
            grads.push(Point::new(du[i] * vv[j], vu[i] * dv[j]));
        }
    }
}

/// Parametric position of local node `l`.
pub fn node_position(order: usize, l: usize) -> Point {
    let n = order + 1;
    Point::new((l / n) as f64 / order as f64, (l % n) as f64 / order as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolatory_at_nodes() {
        let (mut v, mut g) = (Vec::new(), Vec::new());
        for order in [1, 2] {
            let m = (order + 1) * (order + 1);
            for l in 0..m {
                lagrange_basis(order, &node_position(order, l), &mut v, &mut g);
                for (k, x) in v.iter().enumerate() {
                    let want = if k == l { 1.0 } else { 0.0 };
                    assert!((x - want).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn theta_values_and_partition() {
        let (v, _) = lagrange_1d(2, 0.5);
        assert_eq!(v, [0.0, 1.0, 0.0]);
        let (mut v, mut g) = (Vec::new(), Vec::new());
        lagrange_basis(2, &Point::new(0.3, 0.7), &mut v, &mut g);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let gs = g.iter().fold(Point::zeros(), |a, b| a + b);
        assert!(gs.norm() < 1e-14);
    }
}
