//! Equality-constrained least squares `min |A u - b|` subject to `C u = c`,
//! for many right-hand sides at once.
//!
//! The constraints are handled in their nullspace: a minimum-norm particular
//! solution plus a least-squares correction restricted to `ker C`. Columns of
//! `A` are equilibrated first; both decompositions are SVDs.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest accepted condition number of the reduced least-squares operator.
pub const MAX_CONDITION: f64 = 1e14;

#[derive(Clone, Debug)]
pub struct ConstrainedFit {
    /// One solution column per right-hand side.
    pub solution: DMatrix<f64>,
    /// Numerical rank of the constraint rows.
    pub constraint_rank: usize,
    /// Condition number of the reduced operator.
    pub condition: f64,
}

/// Solves for every column of `b` (with the matching column of `c`).
pub fn constrained_lsq(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, cr: &DMatrix<f64>) -> Result<ConstrainedFit> {
    let n = a.ncols();
    let m = b.ncols();
    let scale: Vec<f64> = (0..n)
        .map(|j| {
            let s = a.column(j).norm();
            if s > 0.0 { 1.0 / s } else { 1.0 }
        })
        .collect();
    let mut ad = a.clone();
    let mut cd = c.clone();
    for j in 0..n {
        ad.column_mut(j).scale_mut(scale[j]);
        cd.column_mut(j).scale_mut(scale[j]);
    }
    // normalize constraint rows so the rank decision is scale free
    let mut crd = cr.clone();
    for i in 0..cd.nrows() {
        let s = cd.row(i).norm();
        if s > 0.0 {
            cd.row_mut(i).scale_mut(1.0 / s);
            crd.row_mut(i).scale_mut(1.0 / s);
        }
    }

    let (up, basis, rank) = if cd.nrows() == 0 {
        (DMatrix::zeros(n, m), DMatrix::zeros(n, 0), 0)
    } else {
        let svd = cd.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let u = svd.u.as_ref().unwrap();
        let vt = svd.v_t.as_ref().unwrap();
        let idx: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > 1e-12 * smax).collect();
        let r = idx.len();
        if r >= n {
            return Err(Error::InfeasibleConstraints { rows: c.nrows(), unknowns: n });
        }
        let mut vr = DMatrix::zeros(n, r);
        let mut up = DMatrix::zeros(n, m);
        for (k, &i) in idx.iter().enumerate() {
            let v = vt.row(i).transpose();
            vr.column_mut(k).copy_from(&v);
            let coef = u.column(i).transpose() * &crd / svd.singular_values[i];
            up += &v * coef;
        }
        let resid = &cd * &up - &crd;
        let tol = 1e-8 * (1.0 + crd.amax());
        if resid.amax() > tol {
            return Err(Error::InfeasibleConstraints { rows: c.nrows(), unknowns: n });
        }
        (up, vr, r)
    };

    // A D P with P the projector onto ker C
    let proj = DMatrix::identity(n, n) - &basis * basis.transpose();
    let red = &ad * &proj;
    let svd = red.svd(true, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let keep = n - rank;
    if order.len() < keep {
        return Err(Error::RankDeficient(format!("{} samples for {} free unknowns", a.nrows(), keep)));
    }
    let smax = svd.singular_values[order[0]];
    let smin = svd.singular_values[order[keep - 1]];
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::RankDeficient(format!("least-squares condition {condition:e}")));
    }
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let rhs = b - &ad * &up;
    let mut sol = up;
    for &i in &order[..keep] {
        let coef = u.column(i).transpose() * &rhs / svd.singular_values[i];
        sol += vt.row(i).transpose() * coef;
    }
    for j in 0..n {
        sol.row_mut(j).scale_mut(scale[j]);
    }
    Ok(ConstrainedFit { solution: sol, constraint_rank: rank, condition })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_matches_normal_equations() {
        let a = DMatrix::from_fn(8, 3, |i, j| ((i + 1) as f64).powi(j as i32));
        let b = DMatrix::from_fn(8, 1, |i, _| (i as f64 * 0.7).sin());
        let f = constrained_lsq(&a, &b, &DMatrix::zeros(0, 3), &DMatrix::zeros(0, 1)).unwrap();
        let ata = a.transpose() * &a;
        let x = ata.cholesky().unwrap().solve(&(a.transpose() * &b));
        assert!((f.solution - x).amax() < 1e-10);
    }

    #[test]
    fn constraints_hold_and_match_kkt() {
        let a = DMatrix::from_fn(10, 4, |i, j| ((i * 3 + j * 5) % 7) as f64 + 0.1 * j as f64);
        let b = DMatrix::from_fn(10, 2, |i, j| (i + j) as f64);
        let c = DMatrix::from_row_slice(1, 4, &[1.0, 1.0, 1.0, 1.0]);
        let cr = DMatrix::from_row_slice(1, 2, &[1.0, -2.0]);
        let f = constrained_lsq(&a, &b, &c, &cr).unwrap();
        assert!((&c * &f.solution - &cr).amax() < 1e-12);
        // KKT oracle
        let mut k = DMatrix::zeros(5, 5);
        k.view_mut((0, 0), (4, 4)).copy_from(&(a.transpose() * &a));
        k.view_mut((0, 4), (4, 1)).copy_from(&c.transpose());
        k.view_mut((4, 0), (1, 4)).copy_from(&c);
        let mut rhs = DMatrix::zeros(5, 2);
        rhs.view_mut((0, 0), (4, 2)).copy_from(&(a.transpose() * &b));
        rhs.view_mut((4, 0), (1, 2)).copy_from(&cr);
        let x = k.lu().solve(&rhs).unwrap();
        assert!((f.solution - x.rows(0, 4)).amax() < 1e-9);
    }

    #[test]
    fn redundant_rows_are_fine_and_conflicts_are_not() {
        let a = DMatrix::from_fn(6, 3, |i, j| ((i + 2) as f64).powi(j as i32));
        let b = DMatrix::from_element(6, 1, 1.0);
        let c = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        let ok = DMatrix::from_row_slice(2, 1, &[1.0, 2.0]);
        assert!(constrained_lsq(&a, &b, &c, &ok).is_ok());
        let bad = DMatrix::from_row_slice(2, 1, &[1.0, 3.0]);
        assert!(matches!(constrained_lsq(&a, &b, &c, &bad), Err(Error::InfeasibleConstraints { .. })));
    }

    #[test]
    fn dependent_columns_are_rejected() {
        let a = DMatrix::from_fn(6, 2, |i, _| i as f64 + 1.0);
        let b = DMatrix::from_element(6, 1, 1.0);
        let r = constrained_lsq(&a, &b, &DMatrix::zeros(0, 2), &DMatrix::zeros(0, 1));
        assert!(matches!(r, Err(Error::RankDeficient(_))));
    }
}
