//! Compressed sparse rows, conjugate gradients, dense fallbacks and condition numbers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries; column indices end up sorted within each row.
    pub fn from_triplets(nrows: usize, ncols: usize, mut trips: Vec<(usize, usize, f64)>) -> Self {
        trips.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(trips.len());
        let mut values: Vec<f64> = Vec::with_capacity(trips.len());
        let mut last = None;
        for (i, j, v) in trips {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        Self { nrows, ncols, indptr, indices, values }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[i]..self.indptr[i + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = &self.indices[self.indptr[i]..self.indptr[i + 1]];
        match r.binary_search(&j) {
            Ok(k) => self.values[self.indptr[i] + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.nrows) {
            let mut s = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            *yi = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn transpose_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                y[self.indices[k]] += self.values[k] * x[i];
            }
        }
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                d[(i, j)] += v;
            }
        }
        d
    }

    /// Largest |A_ij - A_ji| relative to the largest |A_ij|.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    /// Submatrix on the given (sorted or not) row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            map[c] = k;
        }
        let mut trips = Vec::new();
        for (r, &i) in rows.iter().enumerate() {
            for (j, v) in self.row(i) {
                if map[j] != usize::MAX {
                    trips.push((r, map[j], v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), trips)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Preconditioned conjugate gradients for a symmetric positive (semi)definite
/// operator; stops when ||r|| <= tol ||b||.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    precond: &[f64],
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(precond).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::NotSpd);
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rnorm = dot(&r, &r).sqrt();
        if rnorm <= tol * bnorm {
            return Ok((x, it));
        }
        for i in 0..n {
            z[i] = r[i] * precond[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = dot(&r, &r).sqrt() / bnorm;
    Err(Error::NotConverged { iterations: max_iter, residual: res })
}

pub const DENSE_LIMIT: usize = 2000;
pub const CG_TOLERANCE: f64 = 1e-10;

/// Solves an SPD system: dense Cholesky up to 2000 unknowns, Jacobi-preconditioned
/// CG (relative residual 1e-10, at most 10 N iterations) beyond.
pub fn solve_spd(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n <= DENSE_LIMIT {
        let chol = a.to_dense().cholesky().ok_or(Error::NotSpd)?;
        return Ok(chol.solve(&DVector::from_column_slice(b)).as_slice().to_vec());
    }
    let diag = a.diagonal();
    if diag.iter().any(|&d| d <= 0.0) {
        return Err(Error::NotSpd);
    }
    let pre: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
    let (x, _) = conjugate_gradient(|p, out| a.mul_vec_into(p, out), &pre, b, CG_TOLERANCE, 10 * n)?;
    Ok(x)
}

pub const EIGEN_LIMIT: usize = 3000;

/// lambda_max / lambda_min of a symmetric positive definite matrix.
pub fn condition_number(a: &CsrMatrix) -> Result<f64> {
    if a.nrows > EIGEN_LIMIT {
        return Err(Error::TooLarge(a.nrows));
    }
    let eig = SymmetricEigen::new(a.to_dense());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &l in eig.eigenvalues.iter() {
        lo = lo.min(l);
        hi = hi.max(l);
    }
    if lo <= 0.0 {
        return Err(Error::NotSpd);
    }
    Ok(hi / lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_solve() {
        let a = CsrMatrix::identity(5);
        let b = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(solve_spd(&a, &b).unwrap(), b);
        assert!((condition_number(&a).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_condition() {
        let a = CsrMatrix::from_triplets(10, 10, (0..10).map(|i| (i, i, (i + 1) as f64)).collect());
        assert!((condition_number(&a).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn duplicates_are_summed() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, 2.0), (0, 0, 3.0), (0, 1, 1.0)]);
        assert_eq!(a.get(0, 0), 4.0);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![5.0, 2.0]);
    }

    #[test]
    fn cg_matches_dense_on_random_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 50;
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let spd = &m * m.transpose() + DMatrix::identity(n, n) * (n as f64);
        let mut trips = Vec::new();
        for i in 0..n {
            for j in 0..n {
                trips.push((i, j, spd[(i, j)]));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, trips);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let pre: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
        let (x, _) = conjugate_gradient(|p, o| a.mul_vec_into(p, o), &pre, &b, 1e-12, 10 * n).unwrap();
        let r = a.mul_vec(&x);
        let res: f64 = r.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(res / bn <= 1e-10);
        let dense = solve_spd(&a, &b).unwrap();
        for i in 0..n {
            assert!((dense[i] - x[i]).abs() < 1e-9);
        }
    }
}
