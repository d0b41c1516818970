//! Sparse symmetric matrices and a preconditioned conjugate gradient solver.

use crate::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    /// Assemble from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            cols.push(c);
            vals.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            *yi = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .find(|&k| self.cols[k] == i)
                    .map(|k| self.vals[k])
                    .unwrap_or(0.0)
            })
            .collect()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[k])] += self.vals[k];
            }
        }
        m
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn remove_mean(x: &mut [f64]) {
    if x.is_empty() {
        return;
    }
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= m);
}

/// Solver controls. `singular` declares a constant null space: the right
/// hand side is projected onto its complement and the solution is returned
/// with zero mean.
#[derive(Debug, Clone, Copy)]
pub struct CgOptions {
    pub abs_tol: f64,
    pub max_iter: usize,
    pub singular: bool,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions {
            abs_tol: 1e-14,
            max_iter: 20_000,
            singular: false,
        }
    }
}

/// Jacobi-preconditioned CG for a symmetric positive (semi-)definite matrix.
/// `x` holds the initial guess on entry. Stops when the max-norm of the
/// residual drops below `abs_tol`.
pub fn cg(a: &Csr, b: &[f64], x: &mut [f64], opts: CgOptions) -> Result<usize> {
    let n = a.dim();
    let mut rhs = b.to_vec();
    if opts.singular {
        remove_mean(&mut rhs);
        remove_mean(x);
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d.abs() > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut ax = vec![0.0; n];
    a.mul(x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let norm_inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if norm_inf(&r) <= opts.abs_tol {
        return Ok(0);
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    if opts.singular {
        remove_mean(&mut z);
    }
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=opts.max_iter {
        a.mul(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm_inf(&r) <= opts.abs_tol {
            if opts.singular {
                remove_mean(x);
            }
            return Ok(it);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        if opts.singular {
            remove_mean(&mut z);
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    // Recompute the true residual before giving up.
    a.mul(x, &mut ax);
    let res = norm_inf(
        &rhs.iter()
            .zip(&ax)
            .map(|(b, a)| b - a)
            .collect::<Vec<_>>(),
    );
    if res <= opts.abs_tol * 10.0 {
        if opts.singular {
            remove_mean(x);
        }
        return Ok(opts.max_iter);
    }
    Err(Error::Solver {
        residual: res,
        iterations: opts.max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cg_matches_dense_solve() {
        // 1D Laplacian with Dirichlet ends.
        let n = 20;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        let a = Csr::from_triplets(n, t);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut x = vec![0.0; n];
        cg(&a, &b, &mut x, CgOptions::default()).unwrap();
        let dense = a.to_dense().lu().solve(&nalgebra::DVector::from_vec(b)).unwrap();
        for i in 0..n {
            assert!((x[i] - dense[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_system_gives_mean_zero_solution() {
        let n = 10;
        let mut t = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            t.push((i, i, 1.0));
            t.push((j, j, 1.0));
            t.push((i, j, -1.0));
            t.push((j, i, -1.0));
        }
        let a = Csr::from_triplets(n, t);
        let b: Vec<f64> = (0..n).map(|i| if i == 0 { 1.0 } else if i == 5 { -1.0 } else { 0.0 }).collect();
        let mut x = vec![0.0; n];
        cg(&a, &b, &mut x, CgOptions { singular: true, ..Default::default() }).unwrap();
        assert!(x.iter().sum::<f64>().abs() < 1e-12);
        let mut ax = vec![0.0; n];
        a.mul(&x, &mut ax);
        for i in 0..n {
            assert!((ax[i] - b[i]).abs() < 1e-12);
        }
    }
}
