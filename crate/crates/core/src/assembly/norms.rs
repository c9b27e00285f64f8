//! Error norms against an exact solution and L2 projection.

use rayon::prelude::*;
use serde::Serialize;

use crate::discretization::Space;
use crate::error::Result;
use crate::geometry::Point;
use crate::problem::ExactSolution;
use crate::solver::{solve_spd, CsrMatrix};

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct ErrorNorms {
    pub l2: f64,
    pub linf: f64,
    /// Full H1 norm (value and gradient).
    pub h1: f64,
    pub h1_semi: f64,
}

/// L2 and H1 by quadrature of degree `degree`; L-infinity over 5x5 samples per cell.
pub fn error_norms(space: &Space, u: &[f64], r: usize, exact: &dyn ExactSolution, degree: usize) -> Result<ErrorNorms> {
    let parts: Vec<(f64, f64, f64)> = (0..space.n_cells())
        .into_par_iter()
        .map(|f| {
            let g = space.globals(f);
            let (mut l2, mut semi) = (0.0, 0.0);
            space.integrate_cell(f, degree, |e, w| {
                let ue = exact.value(&e.x);
                let ge = exact.grad(&e.x);
                for a in 0..r {
                    let mut v = 0.0;
                    let mut gr = Point::zeros();
                    for (k, &d) in g.iter().enumerate() {
                        v += u[r * d + a] * e.values[k];
                        gr += e.grads[k] * u[r * d + a];
                    }
                    l2 += w * (v - ue[a]).powi(2);
                    semi += w * (gr - ge[a]).norm_squared();
                }
            })?;
            let mut linf = 0.0f64;
            for p in space.sample_points(f, 5) {
                let e = space.eval_at(f, &p)?;
                let ue = exact.value(&e.x);
                for a in 0..r {
                    let v: f64 = g.iter().enumerate().map(|(k, &d)| u[r * d + a] * e.values[k]).sum();
                    linf = linf.max((v - ue[a]).abs());
                }
            }
            Ok((l2, semi, linf))
        })
        .collect::<Result<_>>()?;
    let (l2, semi, linf) = parts.iter().fold((0.0, 0.0, 0.0f64), |acc, p| (acc.0 + p.0, acc.1 + p.1, acc.2.max(p.2)));
    Ok(ErrorNorms { l2: l2.sqrt(), linf, h1: (l2 + semi).sqrt(), h1_semi: semi.sqrt() })
}

/// L2 projection of `func` measured on the quad cells only (polygon functions
/// are determined by their neighbors, so every dof is still seen).
pub fn l2_projection(space: &Space, func: &(dyn Fn(&Point) -> [f64; 2] + Sync), r: usize, degree: usize) -> Result<Vec<f64>> {
    let n = space.n_dofs();
    let mut trips = Vec::new();
    let mut rhs = vec![vec![0.0; n]; r];
    for f in 0..space.n_cells() {
        if space.quads[f].is_none() {
            continue;
        }
        let g = space.globals(f);
        space.integrate_cell(f, degree, |e, w| {
            let fx = func(&e.x);
            for (a, &da) in g.iter().enumerate() {
                for (b, &db) in g.iter().enumerate() {
                    trips.push((da, db, w * e.values[a] * e.values[b]));
                }
                for c in 0..r {
                    rhs[c][da] += w * e.values[a] * fx[c];
                }
            }
        })?;
    }
    let m = CsrMatrix::from_triplets(n, n, trips);
    let mut u = vec![0.0; r * n];
    for (c, b) in rhs.iter().enumerate() {
        let x = solve_spd(&m, b)?;
        for d in 0..n {
            u[r * d + c] = x[d];
        }
    }
    Ok(u)
}
