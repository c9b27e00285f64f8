//! Quadratic B-splines by Cox-de Boor recursion (0/0 taken as 0).

/// One quadratic B-spline, given by its four knots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplineBasis1D {
    pub knots: [f64; 4],
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

impl SplineBasis1D {
    pub fn new(knots: [f64; 4]) -> Self {
        debug_assert!(knots.windows(2).all(|w| w[0] <= w[1]));
        Self { knots }
    }

    /// Value and derivative of the polynomial piece living on knot span `span`
    /// (0, 1 or 2), valid on the closed span.
    pub fn eval_piece(&self, span: usize, t: f64) -> (f64, f64) {
        let k = &self.knots;
        let n0 = |i: usize| if i == span { 1.0 } else { 0.0 };
        let n1 = |i: usize| ratio(t - k[i], k[i + 1] - k[i]) * n0(i) + ratio(k[i + 2] - t, k[i + 2] - k[i + 1]) * n0(i + 1);
        let (a, b) = (n1(0), n1(1));
        let value = ratio(t - k[0], k[2] - k[0]) * a + ratio(k[3] - t, k[3] - k[1]) * b;
        let deriv = 2.0 * (ratio(a, k[2] - k[0]) - ratio(b, k[3] - k[1]));
        (value, deriv)
    }

    /// Value and derivative at `t`; zero outside the support. Spans are
    /// half-open except the last nonempty one, which includes its right end.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let k = &self.knots;
        if t < k[0] || t > k[3] {
            return (0.0, 0.0);
        }
        let last = (0..3).rev().find(|&s| k[s + 1] > k[s]);
        let Some(last) = last else { return (0.0, 0.0) };
        for s in 0..3 {
            if k[s + 1] > k[s] && ((t >= k[s] && t < k[s + 1]) || (s == last && t == k[s + 1])) {
                return self.eval_piece(s, t);
            }
        }
        (0.0, 0.0)
    }
}

pub fn bspline_quad_eval(basis: &SplineBasis1D, t: f64) -> (f64, f64) {
    basis.eval(t)
}

/// The three quadratic B-splines active on the span [0, 1] of a cell, with an
/// open (repeated) knot on the sides flagged as boundary.
pub fn cell_functions(left_boundary: bool, right_boundary: bool) -> [SplineBasis1D; 3] {
    let (l2, l1) = if left_boundary { (0.0, 0.0) } else { (-2.0, -1.0) };
    let (r1, r2) = if right_boundary { (1.0, 1.0) } else { (2.0, 3.0) };
    let kv = [l2, l1, 0.0, 1.0, r1, r2];
    [0, 1, 2].map(|j| SplineBasis1D::new([kv[j], kv[j + 1], kv[j + 2], kv[j + 3]]))
}

/// Values and derivatives of the three cell functions at `t` in [0, 1].
pub fn eval_cell(funcs: &[SplineBasis1D; 3], t: f64) -> [(f64, f64); 3] {
    // the cell span is knot span 2 - j of function j
    [funcs[0].eval_piece(2, t), funcs[1].eval_piece(1, t), funcs[2].eval_piece(0, t)]
}

#[cfg(test)]
mod tests {
    use super::*;

    // direct recursion on an arbitrary knot vector, used as an oracle
    fn cox_de_boor(knots: &[f64], i: usize, p: usize, t: f64) -> f64 {
        if p == 0 {
            return if knots[i] <= t && t < knots[i + 1] { 1.0 } else { 0.0 };
        }
        let a = ratio(t - knots[i], knots[i + p] - knots[i]) * cox_de_boor(knots, i, p - 1, t);
        let b = ratio(knots[i + p + 1] - t, knots[i + p + 1] - knots[i + 1]) * cox_de_boor(knots, i + 1, p - 1, t);
        a + b
    }

    #[test]
    fn open_end_interpolates() {
        let b = SplineBasis1D::new([0.0, 0.0, 0.0, 1.0]);
        assert_eq!(b.eval(0.0).0, 1.0);
    }

    #[test]
    fn uniform_values() {
        let b = SplineBasis1D::new([0.0, 1.0, 2.0, 3.0]);
        assert!((b.eval(1.5).0 - 0.75).abs() < 1e-15);
        assert!((b.eval(1.0).0 - 0.5).abs() < 1e-15);
        assert!((b.eval(1.5).1).abs() < 1e-15);
        assert_eq!(b.eval(3.5), (0.0, 0.0));
    }

    #[test]
    fn matches_recursion_on_open_knots() {
        let kv = [0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 4.0, 4.0, 4.0];
        for i in 0..6 {
            let b = SplineBasis1D::new([kv[i], kv[i + 1], kv[i + 2], kv[i + 3]]);
            for k in 0..40 {
                let t = k as f64 * 0.1;
                let want = cox_de_boor(&kv, i, 2, t);
                assert!((b.eval(t).0 - want).abs() < 1e-14, "i={i} t={t}");
                let h = 1e-6;
                if t > h && t + h < 4.0 && (t - t.round()).abs() > 1e-3 {
                    let fd = (cox_de_boor(&kv, i, 2, t + h) - cox_de_boor(&kv, i, 2, t - h)) / (2.0 * h);
                    assert!((b.eval(t).1 - fd).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn cell_functions_partition_unity() {
        for (lb, rb) in [(false, false), (true, false), (false, true), (true, true)] {
            let f = cell_functions(lb, rb);
            for k in 0..=10 {
                let t = k as f64 / 10.0;
                let v = eval_cell(&f, t);
                let s: f64 = v.iter().map(|x| x.0).sum();
                let d: f64 = v.iter().map(|x| x.1).sum();
                assert!((s - 1.0).abs() < 1e-15);
                assert!(d.abs() < 1e-14);
            }
        }
        let v = eval_cell(&cell_functions(false, false), 0.5);
        assert!((v[1].0 - 0.75).abs() < 1e-15);
        assert!((v[0].0 - 0.125).abs() < 1e-15);
    }
}
