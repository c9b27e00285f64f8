//! Global systems: stiffness, load vector, boundary conditions, solve and
//! error measurement. Element-local work runs in parallel; results are merged
//! in cell order so the assembled matrices are deterministic.

mod boundary;
mod norms;
mod system;

pub use boundary::{apply_neumann, boundary_edges, dirichlet_fit, DirichletFit};
pub use norms::{error_norms, l2_projection, ErrorNorms};
pub use system::{solve, SparseSystem};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::discretization::Space;
use crate::error::Result;
use crate::pde::Pde;
use crate::problem::Problem;
use crate::solver::CsrMatrix;

/// Default quadrature degree for cell integrals.
pub const QUAD_DEGREE: usize = 6;

/// Local stiffness matrices of every cell in the basis of its global functions.
pub fn local_stiffness(space: &Space, pde: &dyn Pde, degree: usize) -> Result<Vec<DMatrix<f64>>> {
    let r = pde.components();
    (0..space.n_cells())
        .into_par_iter()
        .map(|f| {
            let n = space.globals(f).len();
            let mut k = DMatrix::zeros(r * n, r * n);
            space.integrate_cell(f, degree, |e, w| pde.add_point_stiffness(w, &e.grads, &mut k))?;
            Ok(k)
        })
        .collect()
}

/// `K_ij = a(phi_j, phi_i)` with vector dofs interleaved as `r * g + alpha`.
pub fn assemble_stiffness(space: &Space, pde: &dyn Pde, degree: usize) -> Result<CsrMatrix> {
    let r = pde.components();
    let locals = local_stiffness(space, pde, degree)?;
    let mut trips = Vec::with_capacity(locals.iter().map(|k| k.len()).sum());
    for (f, k) in locals.iter().enumerate() {
        let g = space.globals(f);
        for a in 0..k.nrows() {
            let ga = r * g[a / r] + a % r;
            for b in 0..k.ncols() {
                let v = k[(a, b)];
                if v != 0.0 {
                    trips.push((ga, r * g[b / r] + b % r, v));
                }
            }
        }
    }
    let n = r * space.n_dofs();
    Ok(CsrMatrix::from_triplets(n, n, trips))
}

/// `b_i = int f . phi_i`.
pub fn assemble_rhs(space: &Space, source: &(dyn Fn(&crate::geometry::Point) -> [f64; 2] + Sync), r: usize, degree: usize) -> Result<Vec<f64>> {
    let parts: Vec<Vec<(usize, f64)>> = (0..space.n_cells())
        .into_par_iter()
        .map(|f| {
            let g = space.globals(f);
            let mut loc = vec![0.0; r * g.len()];
            space.integrate_cell(f, degree, |e, w| {
                let s = source(&e.x);
                for (k, v) in e.values.iter().enumerate() {
                    for a in 0..r {
                        loc[r * k + a] += w * s[a] * v;
                    }
                }
            })?;
            Ok(loc.into_iter().enumerate().map(|(i, v)| (r * g[i / r] + i % r, v)).collect())
        })
        .collect::<Result<_>>()?;
    let mut b = vec![0.0; r * space.n_dofs()];
    for part in parts {
        for (i, v) in part {
            b[i] += v;
        }
    }
    Ok(b)
}

/// Stiffness, load (with Neumann terms) and Dirichlet values for a problem.
pub fn assemble_system(space: &Space, problem: &Problem, degree: usize) -> Result<SparseSystem> {
    let pde = problem.pde.as_ref();
    let r = pde.components();
    let k = assemble_stiffness(space, pde, degree)?;
    let mut f = assemble_rhs(space, problem.source.as_ref(), r, degree)?;
    if let Some(n) = &problem.neumann {
        apply_neumann(space, n, r, &mut f)?;
    }
    let fit = dirichlet_fit(space, problem, r)?;
    Ok(SparseSystem::new(k, f, fit.values))
}
