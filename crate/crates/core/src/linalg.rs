//! Small dense helpers generic over [`Field`].
//!
//! `nalgebra` storage is used for matrices, but arithmetic is written out so
//! that it also works for exact rationals, which do not implement nalgebra's
//! closed-operator traits.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{lit, Field, Real};

pub fn identity<T: Field>(n: usize) -> DMatrix<T> {
    DMatrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
}

pub fn matmul<T: Field>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    let mut out = DMatrix::from_element(a.nrows(), b.ncols(), T::zero());
    for j in 0..b.ncols() {
        for k in 0..a.ncols() {
            let bkj = &b[(k, j)];
            if bkj.is_zero() {
                continue;
            }
            for i in 0..a.nrows() {
                let prod = a[(i, k)].clone() * bkj.clone();
                out[(i, j)] = out[(i, j)].clone() + prod;
            }
        }
    }
    out
}

pub fn matvec<T: Field>(a: &DMatrix<T>, x: &[T]) -> Vec<T> {
    assert_eq!(a.ncols(), x.len(), "matvec shape mismatch");
    (0..a.nrows())
        .map(|i| {
            (0..a.ncols()).fold(T::zero(), |acc, j| acc + a[(i, j)].clone() * x[j].clone())
        })
        .collect()
}

pub fn transpose<T: Field>(a: &DMatrix<T>) -> DMatrix<T> {
    DMatrix::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].clone())
}

pub fn sub<T: Field>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].clone() - b[(i, j)].clone())
}

pub fn dot<T: Field>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

/// Entrywise max-abs norm of a matrix.
pub fn max_abs<T: Field>(a: &DMatrix<T>) -> T {
    a.iter()
        .map(Field::magnitude)
        .fold(T::zero(), |m, v| if v > m { v } else { m })
}

/// Solves `a x = rhs` by Gaussian elimination with partial pivoting.
pub fn solve<T: Field>(a: &DMatrix<T>, rhs: &[T]) -> Result<Vec<T>> {
    let n = a.nrows();
    if a.ncols() != n || rhs.len() != n {
        return Err(Error::InvalidArgument(format!(
            "solve expects a square system, got {}x{} with rhs of length {}",
            a.nrows(),
            a.ncols(),
            rhs.len()
        )));
    }
    let mut m = a.clone();
    let mut x = rhs.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                m[(r, col)]
                    .magnitude()
                    .partial_cmp(&m[(s, col)].magnitude())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if m[(pivot_row, col)].is_zero() || !m[(pivot_row, col)].is_finite_value() {
            return Err(Error::Numeric("singular matrix in dense solve".into()));
        }
        if pivot_row != col {
            m.swap_rows(pivot_row, col);
            x.swap(pivot_row, col);
        }
        let pivot = m[(col, col)].clone();
        for r in col + 1..n {
            if m[(r, col)].is_zero() {
                continue;
            }
            let factor = m[(r, col)].clone() / pivot.clone();
            for c in col..n {
                let v = m[(r, c)].clone() - factor.clone() * m[(col, c)].clone();
                m[(r, c)] = v;
            }
            x[r] = x[r].clone() - factor * x[col].clone();
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col].clone();
        for c in col + 1..n {
            acc = acc - m[(col, c)].clone() * x[c].clone();
        }
        x[col] = acc / m[(col, col)].clone();
    }
    Ok(x)
}

/// Largest eigenvalue of a small symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_max_eigenvalue<T: Real>(a: &DMatrix<T>) -> T {
    let n = a.nrows();
    if n == 0 {
        return T::zero();
    }
    let mut m = a.clone();
    let two = T::one() + T::one();
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..n {
            diag = diag + m[(i, i)] * m[(i, i)];
            for j in i + 1..n {
                off = off + m[(i, j)] * m[(i, j)];
            }
        }
        if off <= T::epsilon() * T::epsilon() * diag || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.is_zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[(i, i)]).fold(T::neg_infinity(), T::max)
}

/// Power iteration for the top eigenvalue of a symmetric PSD operator.
///
/// Stops when the Rayleigh quotient changes by less than `tol` (relative).
pub fn power_iteration<T: Real>(
    dim: usize,
    apply: impl Fn(&[T]) -> Vec<T>,
    tol: T,
    max_iter: usize,
) -> T {
    if dim == 0 {
        return T::zero();
    }
    // deterministic start with all components nonzero
    let mut v: Vec<T> = (0..dim)
        .map(|i| T::one() + lit::<T>(((i * 7919) % 101) as f64 / 101.0))
        .collect();
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x = *x / norm);
    let mut estimate = T::zero();
    for _ in 0..max_iter {
        let w = apply(&v);
        let rq = dot(&v, &w);
        let wn = dot(&w, &w).sqrt();
        if wn.is_zero() {
            return T::zero();
        }
        v = w.into_iter().map(|x| x / wn).collect();
        let converged = (rq - estimate).abs() <= tol * rq.abs();
        estimate = rq;
        if converged {
            break;
        }
    }
    estimate
}
