//! Design matrices, datasets, LibSVM I/O and synthetic generators.

mod csc;
mod libsvm;
mod synth;

pub use csc::CscMatrix;
pub use libsvm::{parse_libsvm, read_libsvm, write_libsvm};
pub use synth::{
    gen_classification, gen_correlated_gaussian, gen_correlated_gaussian_with_truth,
    log_spaced_spectrum, random_orthogonal, spd_with_spectrum, Synthetic,
};

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// A design matrix with its targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub a: CscMatrix<T>,
    pub y: Vec<T>,
    pub name: String,
}

impl<T: Real> Dataset<T> {
    pub fn new(a: CscMatrix<T>, y: Vec<T>, name: impl Into<String>) -> Result<Self> {
        if a.n_rows() != y.len() {
            return Err(invalid(format!(
                "{} targets for a design with {} rows",
                y.len(),
                a.n_rows()
            )));
        }
        Ok(Self {
            a,
            y,
            name: name.into(),
        })
    }

    pub fn n_samples(&self) -> usize {
        self.a.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.a.n_cols()
    }

    /// Maps the two distinct label values to {−1, +1}, smaller to −1.
    pub fn to_binary_labels(&self) -> Result<Self> {
        let mut distinct: Vec<T> = Vec::new();
        for &v in &self.y {
            if !distinct.contains(&v) {
                distinct.push(v);
                if distinct.len() > 2 {
                    return Err(invalid("more than two distinct labels"));
                }
            }
        }
        if distinct.len() != 2 {
            return Err(invalid("binary labels need exactly two distinct values"));
        }
        let low = distinct[0].min(distinct[1]);
        let y = self
            .y
            .iter()
            .map(|&v| if v == low { -T::one() } else { T::one() })
            .collect();
        Ok(Self {
            a: self.a.clone(),
            y,
            name: self.name.clone(),
        })
    }

    /// Keeps the first `k` features in file order.
    pub fn first_features(&self, k: usize) -> Self {
        Self {
            a: self.a.with_columns(k.min(self.a.n_cols())),
            y: self.y.clone(),
            name: format!("{}_first{}", self.name, k),
        }
    }
}

/// Squared Euclidean norm of every column.
pub fn col_norms_sq<T: Real>(a: &CscMatrix<T>) -> Vec<T> {
    (0..a.n_cols())
        .map(|j| a.col(j).1.iter().map(|&v| v * v).sum())
        .collect()
}
