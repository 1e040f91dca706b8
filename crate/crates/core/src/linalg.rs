//! Small dense linear algebra: Cholesky with a pivot floor, projections,
//! and an exact rational kernel for integer matrices.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Smallest pivot accepted by [`cholesky`].
pub const PIVOT_FLOOR: f64 = 1e-12;

/// Lower-triangular `L` with `L Lᵀ = G`. Rows of `L` realize vectors whose
/// Gram matrix is `G`.
pub fn cholesky(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    if g.ncols() != n {
        return Err(Error::InvalidMetric("Gram matrix is not square".into()));
    }
    let mut l = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s.is_nan() || s <= PIVOT_FLOOR {
                    return Err(Error::Degenerate(format!("pivot {s:.3e} at position {i}")));
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(l)
}

pub fn is_positive_definite(g: &DMatrix<f64>) -> bool {
    cholesky(g).is_ok()
}

/// Orthonormal basis of the span of `vs` by modified Gram–Schmidt; vectors
/// whose residual norm falls under `tol` are dropped.
pub fn orthonormal_basis(vs: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vs {
        let mut r = v.clone();
        for q in &basis {
            let c = q.dot(&r);
            r -= q * c;
        }
        let norm = r.norm();
        if norm > tol {
            basis.push(r / norm);
        }
    }
    basis
}

/// `v` minus its orthogonal projection onto the span of the orthonormal `basis`.
pub fn reject(v: &DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    let mut r = v.clone();
    for q in basis {
        let c = q.dot(&r);
        r -= q * c;
    }
    r
}

/// Solve `a x = b` for a small square system.
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Degenerate("singular linear system".into()))
}

/// Reduced row echelon form over the rationals. Returns the reduced matrix
/// and its pivot columns.
pub fn rref(m: &[Vec<i64>], cols: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| row.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = BigRational::one() / a[r][c].clone();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    (a, pivots)
}

/// A basis of the kernel of an integer matrix, one vector per free column,
/// with that free coordinate equal to one.
pub fn rational_kernel(m: &[Vec<i64>], cols: usize) -> Vec<Vec<BigRational>> {
    let (a, pivots) = rref(m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -a[row][f].clone();
            }
            v
        })
        .collect()
}

pub fn rational_rank(m: &[Vec<i64>], cols: usize) -> usize {
    rref(m, cols).1.len()
}
