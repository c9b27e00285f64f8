//! Second-order elliptic operators: the bilinear form at a quadrature point,
//! the flux, the strong form applied to a smooth field, and the vector fields
//! whose consistency rows a polygon basis has to satisfy.

use std::fmt::Debug;

use nalgebra::DMatrix;

use crate::geometry::{Mat2, Point};
use crate::poly::constraints::{monomial_gradients, ConstraintMode, LinearField};

pub trait Pde: Send + Sync + Debug {
    fn name(&self) -> &'static str;
    /// Unknowns per scalar dof (1 or 2). Vector dofs are interleaved: `r * g + alpha`.
    fn components(&self) -> usize;
    /// Lower bound on kernel centers per polygon.
    fn min_kernels(&self) -> usize;
    /// Fields `V` with `int (div V phi + V . grad phi) = 0` required of every polygon function.
    fn constraint_fields(&self, mode: ConstraintMode, origin: &Point, radius: f64) -> Vec<LinearField>;
    /// Adds `w * a(phi_b e_beta, phi_a e_alpha)` for all scalar functions with
    /// physical gradients `grads` into `k` (row `r * a + alpha`).
    fn add_point_stiffness(&self, w: f64, grads: &[Point], k: &mut DMatrix<f64>);
    /// Flux rows: `grad u` for scalar problems, the stress for elasticity.
    fn flux(&self, grads: &[Point; 2]) -> [Point; 2];
    /// The source `f` with `-div flux(u) = f` for a field with the given Hessians.
    fn source_from_hessians(&self, hess: &[Mat2; 2]) -> [f64; 2];
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Poisson;

impl Pde for Poisson {
    fn name(&self) -> &'static str {
        "poisson"
    }
    fn components(&self) -> usize {
        1
    }
    fn min_kernels(&self) -> usize {
        5
    }
    fn constraint_fields(&self, mode: ConstraintMode, origin: &Point, radius: f64) -> Vec<LinearField> {
        crate::poly::constraints::poisson_fields(mode, origin, radius)
    }
    fn add_point_stiffness(&self, w: f64, grads: &[Point], k: &mut DMatrix<f64>) {
        let n = grads.len();
        for a in 0..n {
            let ga = grads[a] * w;
            for b in a..n {
                let v = ga.dot(&grads[b]);
                k[(a, b)] += v;
                if a != b {
                    k[(b, a)] += v;
                }
            }
        }
    }
    fn flux(&self, grads: &[Point; 2]) -> [Point; 2] {
        [grads[0], Point::zeros()]
    }
    fn source_from_hessians(&self, hess: &[Mat2; 2]) -> [f64; 2] {
        [-hess[0].trace(), 0.0]
    }
}

/// Plane-strain linear elasticity.
#[derive(Clone, Copy, Debug)]
pub struct Elasticity {
    pub lambda: f64,
    pub mu: f64,
}

impl Elasticity {
    pub fn from_young(e: f64, nu: f64) -> Self {
        Self { lambda: e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), mu: e / (2.0 * (1.0 + nu)) }
    }
}

impl Pde for Elasticity {
    fn name(&self) -> &'static str {
        "elasticity"
    }
    fn components(&self) -> usize {
        2
    }
    fn min_kernels(&self) -> usize {
        15
    }
    fn constraint_fields(&self, mode: ConstraintMode, origin: &Point, radius: f64) -> Vec<LinearField> {
        // rows of the stress of q e_a tested against phi e_b:
        // V = lambda d_a q e_b + mu delta_ab grad q + mu d_b q e_a, symmetric in (a, b)
        let (l, m) = (self.lambda, self.mu);
        let e = [Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let mut out = Vec::new();
        for (a, b) in [(0, 0), (0, 1), (1, 1)] {
            for (g, h) in monomial_gradients(mode) {
                let delta = if a == b { 1.0 } else { 0.0 };
                let bl = e[b] * (l * g[a]) + g * (m * delta) + e[a] * (m * g[b]);
                let ml = e[b] * h.row(a) * l + h * (m * delta) + e[a] * h.row(b) * m;
                out.push(LinearField::in_frame(bl / radius, ml / radius, origin, radius));
            }
        }
        out
    }
    fn add_point_stiffness(&self, w: f64, grads: &[Point], k: &mut DMatrix<f64>) {
        let (l, m) = (self.lambda * w, self.mu * w);
        let n = grads.len();
        for a in 0..n {
            let ga = grads[a];
            for b in 0..n {
                let gb = grads[b];
                let dot = ga.dot(&gb);
                for al in 0..2 {
                    for be in 0..2 {
                        let mut v = l * ga[al] * gb[be] + m * gb[al] * ga[be];
                        if al == be {
                            v += m * dot;
                        }
                        k[(2 * a + al, 2 * b + be)] += v;
                    }
                }
            }
        }
    }
    fn flux(&self, grads: &[Point; 2]) -> [Point; 2] {
        let div = grads[0].x + grads[1].y;
        let shear = self.mu * (grads[0].y + grads[1].x);
        [
            Point::new(self.lambda * div + 2.0 * self.mu * grads[0].x, shear),
            Point::new(shear, self.lambda * div + 2.0 * self.mu * grads[1].y),
        ]
    }
    fn source_from_hessians(&self, hess: &[Mat2; 2]) -> [f64; 2] {
        // (div sigma)_b = (lambda + mu) d_b div u + mu lap u_b
        let mut f = [0.0; 2];
        for (b, fb) in f.iter_mut().enumerate() {
            let grad_div = hess[0][(b, 0)] + hess[1][(b, 1)];
            *fb = -((self.lambda + self.mu) * grad_div + self.mu * hess[b].trace());
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lame_parameters() {
        let e = Elasticity::from_young(200.0, 0.35);
        assert!((e.mu - 200.0 / 2.7).abs() < 1e-12);
        assert!((e.lambda - 70.0 / (1.35 * 0.3)).abs() < 1e-10);
    }

    #[test]
    fn elasticity_point_matrix_kills_rigid_modes() {
        let el = Elasticity::from_young(200.0, 0.35);
        // gradients of three functions; rigid modes evaluated through nodal values
        // of a linear interpolant: use phi = 1, x, y directly
        let grads = [Point::zeros(), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let mut k = DMatrix::zeros(6, 6);
        el.add_point_stiffness(1.0, &grads, &mut k);
        // rotation u = (-y, x): coefficient -1 on (phi_y, x comp), +1 on (phi_x, y comp)
        let mut rot = nalgebra::DVector::zeros(6);
        rot[2 * 2] = -1.0;
        rot[2 * 1 + 1] = 1.0;
        assert!((&k * rot).amax() < 1e-12);
        assert!((k.clone() - k.transpose()).amax() < 1e-12);
    }

    #[test]
    fn elasticity_fields_span_all_linear_fields() {
        let el = Elasticity::from_young(200.0, 0.35);
        let f = el.constraint_fields(ConstraintMode::Quadratic, &Point::new(0.3, 0.1), 0.5);
        assert_eq!(f.len(), 15);
        let m = DMatrix::from_fn(15, 6, |i, j| {
            let v = &f[i];
            [v.b.x, v.b.y, v.m[(0, 0)], v.m[(0, 1)], v.m[(1, 0)], v.m[(1, 1)]][j]
        });
        assert_eq!(m.rank(1e-9), 6);
    }
}
