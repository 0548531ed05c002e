//! Sparse linear algebra: CSR matrices, Jacobi-preconditioned BiCGStab, and a
//! dense LU oracle for verification.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row term lists (columns need not be sorted; duplicates
    /// are merged).
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|t| t.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for (c, v) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            for (c, v) in merged {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[r] = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[k] == r {
                    d[r] = self.vals[k];
                }
            }
        }
        d
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] += self.vals[k];
            }
        }
        m
    }

    /// Coordinate text form `row col value`, one entry per line.
    pub fn write_coo(&self, out: &mut dyn std::io::Write) -> std::io::Result<()> {
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                writeln!(out, "{} {} {:.17e}", r, self.cols[k], self.vals[k])?;
            }
        }
        Ok(())
    }
}

/// Convergence record of an iterative solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned BiCGStab. `tol` is a relative residual (against
/// `‖b‖`); breakdown and non-convergence are distinct errors.
pub fn bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.n;
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d.abs() > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let precond = |r: &[f64], z: &mut [f64]| {
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
    };

    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], SolveStats { iterations: 0, residual: 0.0 }));
    }

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0f64, 1.0f64, 1.0f64);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut t = vec![0.0; n];

    for it in 1..=max_iter {
        let rho1 = dot(&r_hat, &r);
        if rho1.abs() < 1e-300 {
            return Err(Error::SolverBreakdown { iterations: it, rho: rho1 });
        }
        let beta = (rho1 / rho) * (alpha / omega);
        rho = rho1;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        precond(&p, &mut p_hat);
        a.matvec(&p_hat, &mut v);
        let rv = dot(&r_hat, &v);
        if rv.abs() < 1e-300 {
            return Err(Error::SolverBreakdown { iterations: it, rho: rv });
        }
        alpha = rho / rv;
        // s = r - alpha v, reusing r.
        for i in 0..n {
            r[i] -= alpha * v[i];
        }
        if norm(&r) / bnorm < tol {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            return Ok((x, SolveStats { iterations: it, residual: norm(&r) / bnorm }));
        }
        precond(&r, &mut s_hat);
        a.matvec(&s_hat, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            return Err(Error::SolverBreakdown { iterations: it, rho: tt });
        }
        omega = dot(&t, &r) / tt;
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] -= omega * t[i];
        }
        let rel = norm(&r) / bnorm;
        if rel < tol {
            return Ok((x, SolveStats { iterations: it, residual: rel }));
        }
        if omega == 0.0 {
            return Err(Error::SolverBreakdown { iterations: it, rho: omega });
        }
    }
    Err(Error::SolverMaxIter {
        max_iter,
        residual: norm(&r) / bnorm,
    })
}

/// Dense LU solve for verification; refuses systems above 5000 unknowns.
pub fn solve_dense(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if a.n > 5000 {
        return Err(Error::DenseTooLarge(a.n));
    }
    let dense = a.to_dense();
    let lu = dense.lu();
    lu.solve(&DVector::from_column_slice(b))
        .map(|x| x.as_slice().to_vec())
        .ok_or(Error::SingularMatrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(n: usize) -> CsrMatrix {
        CsrMatrix::from_rows((0..n).map(|i| vec![(i, 1.0)]).collect())
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let a = identity(5);
        let b = vec![1.0, -2.0, 3.0, 0.5, 0.0];
        let (x, stats) = bicgstab(&a, &b, 1e-12, 10).unwrap();
        assert_eq!(stats.iterations, 1);
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-12);
        }
    }

    #[test]
    fn one_by_one_dense() {
        let a = CsrMatrix::from_rows(vec![vec![(0, 4.0)]]);
        let x = solve_dense(&a, &[2.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CsrMatrix::from_rows(vec![vec![(0, 1.0), (1, 1.0)], vec![(0, 1.0), (1, 1.0)]]);
        assert!(matches!(solve_dense(&a, &[1.0, 2.0]), Err(Error::SingularMatrix)));
    }

    #[test]
    fn random_spd_iterative_matches_dense() {
        // A = M Mᵀ + 50 I for a deterministic pseudo-random M.
        let n = 50;
        let mut state = 99u64;
        let mut rand = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let m = DMatrix::from_fn(n, n, |_, _| rand());
        let spd = &m * m.transpose() + DMatrix::identity(n, n) * 50.0;
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| (0..n).map(|j| (j, spd[(i, j)])).collect())
            .collect();
        let a = CsrMatrix::from_rows(rows);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let (x, _) = bicgstab(&a, &b, 1e-12, 1000).unwrap();
        let xd = solve_dense(&a, &b).unwrap();
        for (u, v) in x.iter().zip(&xd) {
            assert!((u - v).abs() < 1e-10, "{u} vs {v}");
        }
    }

    #[test]
    fn duplicate_entries_are_merged() {
        let a = CsrMatrix::from_rows(vec![vec![(0, 1.0), (0, 2.0)]]);
        assert_eq!(a.cols.len(), 1);
        assert_eq!(a.vals[0], 3.0);
    }

    #[test]
    fn max_iter_is_distinct_error() {
        // Indefinite, badly conditioned 2x2 cycle that BiCGStab cannot finish
        // in one iteration.
        let a = CsrMatrix::from_rows(vec![vec![(0, 1.0), (1, 1e6)], vec![(0, 1e6, )]]);
        let r = bicgstab(&a, &[1.0, 1.0], 1e-14, 1);
        assert!(matches!(
            r,
            Err(Error::SolverMaxIter { .. }) | Err(Error::SolverBreakdown { .. })
        ));
    }
}
