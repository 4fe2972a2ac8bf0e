//! Seeded synthetic problem generators.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{CscMatrix, Dataset};
use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Generated data together with the coefficients that produced it.
#[derive(Debug, Clone)]
pub struct Synthetic<T> {
    pub dataset: Dataset<T>,
    pub x_true: Vec<T>,
}

fn check_args(n: usize, p: usize, corr: f64) -> Result<()> {
    if n == 0 || p == 0 {
        return Err(invalid("n and p must be at least 1"));
    }
    if !(0.0..1.0).contains(&corr) {
        return Err(invalid(format!("corr must lie in [0, 1), got {corr}")));
    }
    Ok(())
}

/// Rows with AR(1) correlation `corr` between neighbouring features.
fn ar1_design(rng: &mut ChaCha8Rng, n: usize, p: usize, corr: f64) -> DMatrix<f64> {
    let innov = (1.0 - corr * corr).sqrt();
    let mut a = DMatrix::zeros(n, p);
    for i in 0..n {
        let mut prev: f64 = rng.sample(StandardNormal);
        a[(i, 0)] = prev;
        for j in 1..p {
            let e: f64 = rng.sample(StandardNormal);
            prev = corr * prev + innov * e;
            a[(i, j)] = prev;
        }
    }
    a
}

/// 10% nonzero coefficients (at least one), standard normal values.
fn sparse_truth(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    let k = ((p as f64) * 0.1).round().max(1.0) as usize;
    let mut idx: Vec<usize> = (0..p).collect();
    for i in 0..k {
        let j = rng.random_range(i..p);
        idx.swap(i, j);
    }
    let mut x = vec![0.0; p];
    for &j in &idx[..k] {
        x[j] = rng.sample(StandardNormal);
    }
    x
}

fn to_dataset<T: Real>(a: &DMatrix<f64>, y: &[f64], name: String) -> Result<Dataset<T>> {
    let a_t = a.map(T::from_f64_lossy);
    let y_t = y.iter().map(|&v| T::from_f64_lossy(v)).collect();
    Dataset::new(CscMatrix::from_dense(&a_t), y_t, name)
}

/// Regression data `y = A x_true + noise` with the requested signal-to-noise ratio.
///
/// The noise variance is `‖A x_true‖² / (n · snr)`.
pub fn gen_correlated_gaussian_with_truth<T: Real>(
    n: usize,
    p: usize,
    corr: f64,
    snr: f64,
    seed: u64,
) -> Result<Synthetic<T>> {
    check_args(n, p, corr)?;
    if !(snr.is_finite() && snr > 0.0) {
        return Err(invalid(format!("snr must be positive and finite, got {snr}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = ar1_design(&mut rng, n, p, corr);
    let x_true = sparse_truth(&mut rng, p);
    let signal = &a * nalgebra::DVector::from_column_slice(&x_true);
    let sigma = (signal.norm_squared() / (n as f64 * snr)).sqrt();
    let y: Vec<f64> = signal
        .iter()
        .map(|&s| {
            let e: f64 = rng.sample(StandardNormal);
            s + sigma * e
        })
        .collect();
    let dataset = to_dataset(&a, &y, format!("synthetic_n{n}_p{p}_seed{seed}"))?;
    Ok(Synthetic {
        dataset,
        x_true: x_true.into_iter().map(T::from_f64_lossy).collect(),
    })
}

pub fn gen_correlated_gaussian<T: Real>(
    n: usize,
    p: usize,
    corr: f64,
    snr: f64,
    seed: u64,
) -> Result<Dataset<T>> {
    gen_correlated_gaussian_with_truth(n, p, corr, snr, seed).map(|s| s.dataset)
}

/// Binary classification data with labels `sign(A x_true + 0.1·noise)` in {−1, +1}.
pub fn gen_classification<T: Real>(n: usize, p: usize, corr: f64, seed: u64) -> Result<Dataset<T>> {
    check_args(n, p, corr)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = ar1_design(&mut rng, n, p, corr);
    let x_true = sparse_truth(&mut rng, p);
    let signal = &a * nalgebra::DVector::from_column_slice(&x_true);
    let y: Vec<f64> = signal
        .iter()
        .map(|&s| {
            let e: f64 = rng.sample(StandardNormal);
            if s + 0.1 * e >= 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    to_dataset(&a, &y, format!("classif_n{n}_p{p}_seed{seed}"))
}

/// Random orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn random_orthogonal(p: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(p, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // sign fix makes the distribution uniform and the result deterministic
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Symmetric matrix `Q diag(eigenvalues) Qᵀ` with a random orthogonal `Q`.
pub fn spd_with_spectrum(eigenvalues: &[f64], seed: u64) -> DMatrix<f64> {
    let p = eigenvalues.len();
    let q = random_orthogonal(p, seed);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(eigenvalues));
    let h = &q * d * q.transpose();
    (&h + h.transpose()) * 0.5
}

/// Eigenvalues log-spaced between `1/kappa` and 1.
pub fn log_spaced_spectrum(p: usize, kappa: f64) -> Vec<f64> {
    if p == 1 {
        return vec![1.0];
    }
    (0..p)
        .map(|i| kappa.powf(-(i as f64) / (p as f64 - 1.0)))
        .collect()
}
