//! Dense exact-rational matrices and the elimination routines used by the
//! chain solvers.

use num_traits::{One, Zero};

use crate::Q;

pub type Matrix = Vec<Vec<Q>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Q::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

pub fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    let cols = b.first().map_or(0, |r| r.len());
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b[k].iter().enumerate() {
                if !y.is_zero() {
                    out[i][j] += x * y;
                }
            }
        }
    }
    out
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn is_zero(m: &Matrix) -> bool {
    m.iter().all(|r| r.iter().all(Q::is_zero))
}

/// Row vector times matrix.
pub fn vec_mul(v: &[Q], m: &Matrix) -> Vec<Q> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![Q::zero(); cols];
    for (k, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in m[k].iter().enumerate() {
            if !y.is_zero() {
                out[j] += x * y;
            }
        }
    }
    out
}

/// Submatrix on the given rows and columns, in the given order.
pub fn select(m: &Matrix, rows: &[usize], cols: &[usize]) -> Matrix {
    rows.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect()
}

/// Exact inverse by Gauss–Jordan elimination; `None` when singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m.iter().zip(identity(n)).map(|(r, e)| r.iter().cloned().chain(e).collect()).collect();
    eliminate(&mut a, n)?;
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `a·x = b` exactly; `None` when `a` is singular.
pub fn solve(a: &Matrix, b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut aug: Matrix =
        a.iter().zip(b).map(|(r, x)| r.iter().cloned().chain(std::iter::once(x.clone())).collect()).collect();
    eliminate(&mut aug, n)?;
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

/// Reduces the first `n` columns of an augmented matrix to the identity.
fn eliminate(a: &mut Matrix, n: usize) -> Option<()> {
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let prow = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(())
}

/// Stationary vector of a stochastic matrix with a single closed class
/// covering all indices: solves `v(P − I) = 0`, `Σv = 1`.
pub fn stationary(p: &Matrix) -> Option<Vec<Q>> {
    let n = p.len();
    if n == 0 {
        return None;
    }
    // transpose of (P − I), last equation replaced by the normalization
    let mut a = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[j][i] = p[i][j].clone() - if i == j { Q::one() } else { Q::zero() };
        }
    }
    a[n - 1] = vec![Q::one(); n];
    let mut b = vec![Q::zero(); n];
    b[n - 1] = Q::one();
    solve(&a, &b)
}
