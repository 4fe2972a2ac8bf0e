use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Compressed sparse-column matrix.
///
/// Column `j` occupies `row_idx[col_ptr[j]..col_ptr[j + 1]]` (strictly
/// increasing) and the matching slice of `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> CscMatrix<T> {
    pub fn try_new(
        n_rows: usize,
        n_cols: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        if col_ptr.len() != n_cols + 1 {
            return Err(invalid(format!(
                "col_ptr has length {}, expected {}",
                col_ptr.len(),
                n_cols + 1
            )));
        }
        if col_ptr[0] != 0 || col_ptr[n_cols] != values.len() || row_idx.len() != values.len() {
            return Err(invalid("col_ptr bounds disagree with stored entries"));
        }
        for j in 0..n_cols {
            let (start, end) = (col_ptr[j], col_ptr[j + 1]);
            if start > end {
                return Err(invalid(format!("col_ptr decreases at column {j}")));
            }
            let rows = &row_idx[start..end];
            if rows.iter().any(|&r| r >= n_rows) {
                return Err(invalid(format!("row index out of range in column {j}")));
            }
            if rows.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid(format!("row indices not strictly increasing in column {j}")));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("stored values must be finite"));
        }
        Ok(Self {
            n_rows,
            n_cols,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            col_ptr: vec![0; n_cols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Compresses a dense matrix, dropping exact zeros.
    pub fn from_dense(dense: &DMatrix<T>) -> Self {
        let mut col_ptr = Vec::with_capacity(dense.ncols() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for j in 0..dense.ncols() {
            for i in 0..dense.nrows() {
                let v = dense[(i, j)];
                if !v.is_zero() {
                    row_idx.push(i);
                    values.push(v);
                }
            }
            col_ptr.push(values.len());
        }
        Self {
            n_rows: dense.nrows(),
            n_cols: dense.ncols(),
            col_ptr,
            row_idx,
            values,
        }
    }

    /// Builds from row-major sparse rows `(col, value)`, columns sorted per row.
    pub(crate) fn from_sorted_rows(n_cols: usize, rows: &[Vec<(usize, T)>]) -> Self {
        let mut counts = vec![0usize; n_cols + 1];
        for row in rows {
            for &(c, _) in row {
                counts[c + 1] += 1;
            }
        }
        for j in 0..n_cols {
            counts[j + 1] += counts[j];
        }
        let nnz = counts[n_cols];
        let mut next = counts.clone();
        let mut row_idx = vec![0; nnz];
        let mut values = vec![T::zero(); nnz];
        for (i, row) in rows.iter().enumerate() {
            for &(c, v) in row {
                let slot = next[c];
                row_idx[slot] = i;
                values[slot] = v;
                next[c] += 1;
            }
        }
        Self {
            n_rows: rows.len(),
            n_cols,
            col_ptr: counts,
            row_idx,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Row indices and values of column `j`.
    #[inline]
    pub fn col(&self, j: usize) -> (&[usize], &[T]) {
        let (start, end) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.row_idx[start..end], &self.values[start..end])
    }

    /// `A_{:j}ᵀ v`
    #[inline]
    pub fn col_dot(&self, j: usize, v: &[T]) -> T {
        let (rows, vals) = self.col(j);
        rows.iter()
            .zip(vals)
            .fold(T::zero(), |acc, (&i, &a)| acc + a * v[i])
    }

    /// `z += alpha · A_{:j}`
    #[inline]
    pub fn col_axpy(&self, j: usize, alpha: T, z: &mut [T]) {
        let (rows, vals) = self.col(j);
        for (&i, &a) in rows.iter().zip(vals) {
            z[i] = z[i] + alpha * a;
        }
    }

    /// `A x`
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n_cols, "matvec dimension mismatch");
        let mut out = vec![T::zero(); self.n_rows];
        for (j, &xj) in x.iter().enumerate() {
            if !xj.is_zero() {
                self.col_axpy(j, xj, &mut out);
            }
        }
        out
    }

    /// `Aᵀ r`
    pub fn rmatvec(&self, r: &[T]) -> Vec<T> {
        assert_eq!(r.len(), self.n_rows, "rmatvec dimension mismatch");
        (0..self.n_cols).map(|j| self.col_dot(j, r)).collect()
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut out = DMatrix::from_element(self.n_rows, self.n_cols, T::zero());
        for j in 0..self.n_cols {
            let (rows, vals) = self.col(j);
            for (&i, &v) in rows.iter().zip(vals) {
                out[(i, j)] = v;
            }
        }
        out
    }

    /// Dense Gram matrix `AᵀA`.
    pub fn gram(&self) -> DMatrix<T> {
        let mut dense_col = vec![T::zero(); self.n_rows];
        let mut g = DMatrix::from_element(self.n_cols, self.n_cols, T::zero());
        for j in 0..self.n_cols {
            let (rows, vals) = self.col(j);
            for (&i, &v) in rows.iter().zip(vals) {
                dense_col[i] = v;
            }
            for k in 0..=j {
                let d = self.col_dot(k, &dense_col);
                g[(j, k)] = d;
                g[(k, j)] = d;
            }
            for &i in rows {
                dense_col[i] = T::zero();
            }
        }
        g
    }

    /// Keeps the first `k` columns, or pads with empty columns when `k` exceeds the width.
    pub fn with_columns(&self, k: usize) -> Self {
        let kept = k.min(self.n_cols);
        let nnz = self.col_ptr[kept];
        let mut col_ptr = self.col_ptr[..=kept].to_vec();
        col_ptr.resize(k + 1, nnz);
        Self {
            n_rows: self.n_rows,
            n_cols: k,
            col_ptr,
            row_idx: self.row_idx[..nnz].to_vec(),
            values: self.values[..nnz].to_vec(),
        }
    }

    /// Submatrix restricted to the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut col_ptr = vec![0];
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        for &j in cols {
            let (rows, vals) = self.col(j);
            row_idx.extend_from_slice(rows);
            values.extend_from_slice(vals);
            col_ptr.push(values.len());
        }
        Self {
            n_rows: self.n_rows,
            n_cols: cols.len(),
            col_ptr,
            row_idx,
            values,
        }
    }
}
