//! The linear system with Dirichlet elimination.

use crate::error::Result;
use crate::solver::{condition_number, solve_spd, CsrMatrix};

#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub k: CsrMatrix,
    pub f: Vec<f64>,
    /// Prescribed (dof, value) pairs, sorted by dof.
    pub dirichlet: Vec<(usize, f64)>,
    pub free: Vec<usize>,
}

impl SparseSystem {
    pub fn new(k: CsrMatrix, f: Vec<f64>, mut dirichlet: Vec<(usize, f64)>) -> Self {
        dirichlet.sort_by_key(|&(d, _)| d);
        let mut fixed = vec![false; f.len()];
        for &(d, _) in &dirichlet {
            fixed[d] = true;
        }
        let free = (0..f.len()).filter(|&i| !fixed[i]).collect();
        Self { k, f, dirichlet, free }
    }

    pub fn n(&self) -> usize {
        self.f.len()
    }

    /// `K_ff` and `f_f - K_fd u_d`.
    pub fn reduced(&self) -> (CsrMatrix, Vec<f64>) {
        let n = self.n();
        let mut ud = vec![0.0; n];
        for &(d, v) in &self.dirichlet {
            ud[d] = v;
        }
        let kud = self.k.mul_vec(&ud);
        let rhs = self.free.iter().map(|&i| self.f[i] - kud[i]).collect();
        (self.k.select(&self.free, &self.free), rhs)
    }

    pub fn expand(&self, uf: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.n()];
        for &(d, v) in &self.dirichlet {
            u[d] = v;
        }
        for (k, &i) in self.free.iter().enumerate() {
            u[i] = uf[k];
        }
        u
    }

    /// `|K_ff u_f - rhs|_inf / |rhs|_inf` for a full solution vector.
    pub fn relative_residual(&self, u: &[f64]) -> f64 {
        let (kff, rhs) = self.reduced();
        let uf: Vec<f64> = self.free.iter().map(|&i| u[i]).collect();
        let ku = kff.mul_vec(&uf);
        let num = ku.iter().zip(&rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let den = rhs.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        if den > 0.0 { num / den } else { num }
    }

    /// Spectral condition number of the reduced matrix.
    pub fn condition_number(&self) -> Result<f64> {
        condition_number(&self.reduced().0)
    }
}

/// Solves the reduced system and returns the full dof vector.
pub fn solve(system: &SparseSystem) -> Result<Vec<f64>> {
    let (kff, rhs) = system.reduced();
    let uf = if rhs.is_empty() { Vec::new() } else { solve_spd(&kff, &rhs)? };
    Ok(system.expand(&uf))
}
