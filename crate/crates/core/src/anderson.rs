//! Anderson extrapolation.
//!
//! Given iterates `x⁽⁰⁾, …, x⁽ᵏ⁾` of a fixed-point map, the extrapolated point
//! is the affine combination `Σ cᵢ x⁽ⁱ⁾` whose coefficients minimize
//! `‖Σ cᵢ (x⁽ⁱ⁾ − x⁽ⁱ⁻¹⁾)‖` subject to `Σ cᵢ = 1`. With `U` the matrix of
//! consecutive differences and `G = UᵀU + λ_reg Id` the minimizer is
//! `c = G⁻¹1 / 1ᵀG⁻¹1` whenever `G` is invertible.
//!
//! Everything here is generic over [`Field`], so the same code runs in `f64`
//! and in exact rationals.

use std::collections::VecDeque;

use crate::error::{invalid, Result};
use crate::linalg::dot;
use crate::scalar::Field;

/// Number of extrapolated points used when nothing else is configured.
pub const DEFAULT_WINDOW: usize = 5;

/// Offline extrapolation keeps every iterate; longer runs are refused.
pub const MAX_OFFLINE_STEPS: usize = 1000;

/// Extrapolation coefficients. `c` is meaningless when `solved` is false.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients<T> {
    pub c: Vec<T>,
    pub solved: bool,
}

impl<T: Field> Coefficients<T> {
    fn unsolved(k: usize) -> Self {
        Self {
            c: vec![T::zero(); k],
            solved: false,
        }
    }
}

/// Coefficients for the difference columns `columns` (each of length `p`).
pub fn extrapolation_coefficients<T: Field>(columns: &[Vec<T>], lambda_reg: &T) -> Coefficients<T> {
    let k = columns.len();
    let mut gram = vec![vec![T::zero(); k]; k];
    for i in 0..k {
        for j in 0..=i {
            let v = dot(&columns[i], &columns[j]);
            gram[i][j] = v.clone();
            gram[j][i] = v;
        }
    }
    coefficients_from_gram(&gram, lambda_reg)
}

/// Coefficients from the Gram matrix `G = UᵀU`.
///
/// Solves `(G + λ_reg Id) z = 1` with [`Field::solve_symmetric`] and
/// normalizes `z`. When that system is singular, the constrained least-squares problem
/// `min cᵀGc` s.t. `Σ cᵢ = 1` is solved on the affine constraint set
/// instead; it can still have a unique minimizer (for instance when one
/// difference is a multiple of another). `solved` is false when no unique
/// minimizer exists numerically.
///
/// A factorization counts as singular when a pivot is non-positive or the
/// ratio of the smallest to the largest diagonal entry of the Cholesky
/// factor `L D^{1/2}` is below [`Field::singular_threshold`]. Those entries
/// are the diagonal of the R factor of `U`, so the test bounds `cond(U)`
/// rather than `cond(UᵀU)`.
pub fn coefficients_from_gram<T: Field>(gram: &[Vec<T>], lambda_reg: &T) -> Coefficients<T> {
    let k = gram.len();
    if k == 0 {
        return Coefficients::unsolved(0);
    }
    let reg: Vec<Vec<T>> = (0..k)
        .map(|i| {
            let mut row = gram[i].clone();
            row[i] = row[i].clone() + lambda_reg.clone();
            row
        })
        .collect();
    coefficients_from_regularized(&reg)
}

/// Coefficients from a Gram matrix that already includes the regularization.
fn coefficients_from_regularized<T: Field>(reg: &[Vec<T>]) -> Coefficients<T> {
    let k = reg.len();
    if let Some(z) = T::solve_symmetric(reg, &vec![T::one(); k], &T::zero()) {
        let total = z.iter().fold(T::zero(), |acc, v| acc + v.clone());
        let scale = z.iter().fold(T::zero(), |acc, v| acc + v.magnitude());
        if !(total.magnitude() <= T::singular_threshold() * scale || total.is_zero()) {
            let c: Vec<T> = z.into_iter().map(|v| v / total.clone()).collect();
            if c.iter().all(Field::is_finite_value) {
                return Coefficients { c, solved: true };
            }
        }
    }
    constrained_fallback(reg)
}

/// Minimizes `cᵀGc` over `Σ cᵢ = 1` with `c = e_k + Z w`, `Z = [e_i − e_k]`.
fn constrained_fallback<T: Field>(g: &[Vec<T>]) -> Coefficients<T> {
    let k = g.len();
    let last = k - 1;
    if k == 1 {
        return Coefficients { c: vec![T::one()], solved: true };
    }
    let reduced: Vec<Vec<T>> = (0..last)
        .map(|i| {
            (0..last)
                .map(|j| {
                    g[i][j].clone() - g[i][last].clone() - g[last][j].clone()
                        + g[last][last].clone()
                })
                .collect()
        })
        .collect();
    let rhs: Vec<T> = (0..last)
        .map(|i| g[last][last].clone() - g[i][last].clone())
        .collect();
    let floor = (0..k).fold(T::zero(), |m, i| {
        if g[i][i] > m {
            g[i][i].clone()
        } else {
            m
        }
    });
    let Some(w) = T::solve_symmetric(&reduced, &rhs, &floor) else {
        return Coefficients::unsolved(k);
    };
    let tail = w.iter().fold(T::one(), |acc, v| acc - v.clone());
    let mut c = w;
    c.push(tail);
    if c.iter().all(Field::is_finite_value) {
        Coefficients { c, solved: true }
    } else {
        Coefficients::unsolved(k)
    }
}

/// Solves the symmetric system `a x = rhs` by LDLᵀ.
///
/// Returns `None` when a pivot is non-positive or the smallest pivot is
/// below the squared singular threshold times `max(largest pivot, floor)`.
pub(crate) fn ldl_solve<T: Field>(a: &[Vec<T>], rhs: &[T], floor: &T) -> Option<Vec<T>> {
    let k = a.len();
    let mut l = vec![vec![T::zero(); k]; k];
    let mut d: Vec<T> = Vec::with_capacity(k);
    for j in 0..k {
        let mut dj = a[j][j].clone();
        for m in 0..j {
            dj = dj - l[j][m].clone() * l[j][m].clone() * d[m].clone();
        }
        if !(dj > T::zero()) || !dj.is_finite_value() {
            return None;
        }
        for i in j + 1..k {
            let mut v = a[i][j].clone();
            for m in 0..j {
                v = v - l[i][m].clone() * l[j][m].clone() * d[m].clone();
            }
            l[i][j] = v / dj.clone();
        }
        d.push(dj);
    }
    let mut lo = d[0].clone();
    let mut hi = floor.clone();
    for v in &d {
        if *v < lo {
            lo = v.clone();
        }
        if *v > hi {
            hi = v.clone();
        }
    }
    // pivots scale like squared entries of the Cholesky factor
    let tol = T::singular_threshold() * T::singular_threshold();
    if lo <= tol * hi {
        return None;
    }

    // L w = rhs, then Lᵀ x = D⁻¹ w
    let mut w = rhs.to_vec();
    for i in 0..k {
        for m in 0..i {
            w[i] = w[i].clone() - l[i][m].clone() * w[m].clone();
        }
    }
    let mut x: Vec<T> = w.into_iter().zip(&d).map(|(wi, di)| wi / di.clone()).collect();
    for i in (0..k).rev() {
        for m in i + 1..k {
            x[i] = x[i].clone() - l[m][i].clone() * x[m].clone();
        }
    }
    Some(x)
}

/// `Σ cᵢ pointsᵢ`
pub fn combine<T: Field>(c: &[T], points: &[&[T]]) -> Vec<T> {
    debug_assert_eq!(c.len(), points.len());
    let p = points.first().map_or(0, |x| x.len());
    let mut out = vec![T::zero(); p];
    for (ci, x) in c.iter().zip(points) {
        for (o, xi) in out.iter_mut().zip(x.iter()) {
            *o = o.clone() + ci.clone() * xi.clone();
        }
    }
    out
}

/// Outcome of one extrapolation attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationResult<T> {
    pub coefficients: Vec<T>,
    /// The extrapolated point, or the newest stored iterate when unsolved.
    pub point: Vec<T>,
    pub solved: bool,
}

/// The last `K + 1` iterates of a sequence.
#[derive(Debug, Clone)]
pub struct ExtrapolationWindow<T> {
    capacity: usize,
    lambda_reg: T,
    points: VecDeque<Vec<T>>,
}

impl<T: Field> ExtrapolationWindow<T> {
    pub fn new(capacity: usize, lambda_reg: T) -> Result<Self> {
        if capacity == 0 {
            return Err(invalid("extrapolation window needs K >= 1"));
        }
        if lambda_reg < T::zero() {
            return Err(invalid("lambda_reg must be nonnegative"));
        }
        Ok(Self {
            capacity,
            lambda_reg,
            points: VecDeque::with_capacity(capacity + 1),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True once `K + 1` points (`K` differences) are stored.
    pub fn is_full(&self) -> bool {
        self.points.len() == self.capacity + 1
    }

    pub fn push(&mut self, x: Vec<T>) {
        if let Some(first) = self.points.front() {
            assert_eq!(first.len(), x.len(), "iterates must share a dimension");
        }
        if self.points.len() == self.capacity + 1 {
            self.points.pop_front();
        }
        self.points.push_back(x);
    }

    /// Forgets everything and starts over from `anchor`.
    pub fn reset(&mut self, anchor: Vec<T>) {
        self.points.clear();
        self.points.push_back(anchor);
    }

    /// Consecutive differences, oldest first.
    pub fn differences(&self) -> Vec<Vec<T>> {
        self.points
            .iter()
            .zip(self.points.iter().skip(1))
            .map(|(a, b)| b.iter().zip(a).map(|(bi, ai)| bi.clone() - ai.clone()).collect())
            .collect()
    }

    /// Extrapolates the stored differences, weighting all points but the oldest.
    ///
    /// Returns `None` with fewer than two points.
    pub fn extrapolate(&self) -> Option<ExtrapolationResult<T>> {
        if self.points.len() < 2 {
            return None;
        }
        let coef = extrapolation_coefficients(&self.differences(), &self.lambda_reg);
        let newest = self.points.back().expect("at least two points");
        let point = if coef.solved {
            let later: Vec<&[T]> = self.points.iter().skip(1).map(Vec::as_slice).collect();
            combine(&coef.c, &later)
        } else {
            newest.clone()
        };
        Some(ExtrapolationResult {
            coefficients: coef.c,
            point,
            solved: coef.solved,
        })
    }
}

/// Base sequence and offline-extrapolated points.
#[derive(Debug, Clone)]
pub struct OfflineRun<T> {
    /// `x⁽⁰⁾, …, x⁽ᵏᵐᵃˣ⁾`
    pub base: Vec<Vec<T>>,
    /// Entry `k − 1` holds the extrapolation built from the first `k` differences.
    pub extrapolated: Vec<Vec<T>>,
    pub solved: Vec<bool>,
}

/// Offline extrapolation: iterate `step` and extrapolate every prefix without
/// feeding anything back into the base sequence.
pub fn offline_anderson<T: Field, F>(
    mut step: F,
    x0: Vec<T>,
    k_max: usize,
    lambda_reg: T,
) -> Result<OfflineRun<T>>
where
    F: FnMut(&[T]) -> Vec<T>,
{
    if k_max == 0 {
        return Err(invalid("offline extrapolation needs k_max >= 1"));
    }
    if k_max > MAX_OFFLINE_STEPS {
        return Err(invalid(format!(
            "offline extrapolation is limited to {MAX_OFFLINE_STEPS} steps, got {k_max}"
        )));
    }
    let mut base = vec![x0];
    let mut diffs: Vec<Vec<T>> = Vec::with_capacity(k_max);
    // regularized Gram matrix, grown by one row and column per step
    let mut gram: Vec<Vec<T>> = Vec::with_capacity(k_max);
    let mut extrapolated = Vec::with_capacity(k_max);
    let mut solved = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let next = step(&base[k - 1]);
        let diff: Vec<T> = next
            .iter()
            .zip(&base[k - 1])
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        base.push(next);
        let row: Vec<T> = diffs.iter().map(|d| dot(d, &diff)).collect();
        for (g, v) in gram.iter_mut().zip(&row) {
            g.push(v.clone());
        }
        let mut last = row;
        last.push(dot(&diff, &diff) + lambda_reg.clone());
        gram.push(last);
        diffs.push(diff);

        let coef = coefficients_from_regularized(&gram);
        let point = if coef.solved {
            let later: Vec<&[T]> = base[1..=k].iter().map(Vec::as_slice).collect();
            combine(&coef.c, &later)
        } else {
            base[k].clone()
        };
        extrapolated.push(point);
        solved.push(coef.solved);
    }
    Ok(OfflineRun {
        base,
        extrapolated,
        solved,
    })
}

/// What happened at an extrapolation step of the online scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// The iterate was replaced by the extrapolated point.
    Accepted,
    /// The guard rejected the extrapolated point.
    Rejected,
    /// The coefficient system was singular.
    Unsolved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineEvent {
    pub step: usize,
    pub outcome: Outcome,
}

#[derive(Debug, Clone)]
pub struct OnlineRun<T> {
    /// `x⁽⁰⁾, …, x⁽ᵏᵐᵃˣ⁾` after any replacement.
    pub iterates: Vec<Vec<T>>,
    pub events: Vec<OnlineEvent>,
}

impl<T> OnlineRun<T> {
    pub fn last(&self) -> &[T] {
        self.iterates.last().expect("at least x0")
    }
}

/// Objective used to accept or reject an extrapolated point.
pub type Guard<'a, T> = &'a dyn Fn(&[T]) -> T;

/// Online extrapolation: every `K` steps the current iterate is replaced by
/// the extrapolation of the last `K` differences.
///
/// With a `guard`, the replacement only happens when
/// `guard(x_e) <= guard(x⁽ᵏ⁾)`.
pub fn online_anderson<T: Field, F>(
    mut step: F,
    x0: Vec<T>,
    window: usize,
    k_max: usize,
    lambda_reg: T,
    guard: Option<Guard<'_, T>>,
) -> Result<OnlineRun<T>>
where
    F: FnMut(&[T]) -> Vec<T>,
{
    let mut buf = ExtrapolationWindow::new(window, lambda_reg)?;
    buf.reset(x0.clone());
    let mut iterates = vec![x0];
    let mut events = Vec::new();
    for k in 1..=k_max {
        let mut x = step(iterates.last().expect("non-empty"));
        buf.push(x.clone());
        if k % window == 0 {
            let res = buf.extrapolate().expect("window holds K + 1 points");
            let outcome = if !res.solved {
                Outcome::Unsolved
            } else if guard.is_some_and(|g| g(&res.point) > g(&x)) {
                Outcome::Rejected
            } else {
                x = res.point;
                Outcome::Accepted
            };
            events.push(OnlineEvent { step: k, outcome });
            buf.reset(x.clone());
        }
        iterates.push(x);
    }
    Ok(OnlineRun { iterates, events })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use nalgebra::{DMatrix, DVector};
    use num_rational::BigRational;
    use proptest::prelude::*;

    #[test]
    fn single_column_gives_unit_weight() {
        let c = extrapolation_coefficients(&[vec![0.3, -2.0]], &0.0);
        assert!(c.solved);
        assert_eq!(c.c, vec![1.0]);
    }

    #[test]
    fn geometric_scalar_sequence() {
        // x_i = 0.5^i from x0 = 1: differences -0.5 and -0.25
        let c = extrapolation_coefficients(&[vec![-0.5f64], vec![-0.25]], &0.0);
        assert!(c.solved);
        assert!((c.c[0] + 1.0).abs() < 1e-12 && (c.c[1] - 2.0).abs() < 1e-12);
        let xe: Vec<f64> = combine(&c.c, &[&[0.5], &[0.25]]);
        assert!(xe[0].abs() < 1e-15);

        let exact = extrapolation_coefficients(
            &[vec![rational(-1, 2)], vec![rational(-1, 4)]],
            &BigRational::from_integer(0.into()),
        );
        assert_eq!(exact.c, vec![rational(-1, 1), rational(2, 1)]);
    }

    #[test]
    fn identical_columns_need_regularization() {
        let u = vec![vec![1.0f64, 2.0, -1.0], vec![1.0, 2.0, -1.0]];
        assert!(!extrapolation_coefficients(&u, &0.0).solved);
        let reg = extrapolation_coefficients(&u, &1e-8);
        assert!(reg.solved);
        // G + λ_reg Id has condition number ~1e9
        assert!((reg.c[0] - 0.5).abs() < 1e-6 && (reg.c[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn nearly_collinear_columns_are_solved() {
        // cond(U) ≈ 3e6, so cond(UᵀU) ≈ 1e13
        let e = 3e-7f64;
        let u = vec![vec![1.0, e], vec![1.0, -e]];
        let c = extrapolation_coefficients(&u, &0.0);
        assert!(c.solved);
        assert!((c.c[0] - 0.5).abs() < 1e-2 && (c.c[1] - 0.5).abs() < 1e-2, "{:?}", c.c);
    }

    #[test]
    fn zero_differences_are_unsolved() {
        let u = vec![vec![0.0; 3]; 2];
        assert!(!extrapolation_coefficients(&u, &0.0).solved);
    }

    #[test]
    fn window_keeps_k_plus_one_points() {
        let mut w = ExtrapolationWindow::new(2, 0.0).unwrap();
        assert!(w.extrapolate().is_none());
        for i in 0..5 {
            w.push(vec![f64::from(i)]);
        }
        assert!(w.is_full());
        assert_eq!(w.len(), 3);
        assert_eq!(w.differences(), vec![vec![1.0], vec![1.0]]);
        assert!(ExtrapolationWindow::new(0, 0.0).is_err());
        assert!(ExtrapolationWindow::new(1, -1.0).is_err());
    }

    #[test]
    fn offline_with_zero_map_returns_the_fixed_point() {
        let b = vec![1.0, -2.0];
        let run = offline_anderson(|_| b.clone(), vec![0.0, 0.0], 3, 0.0).unwrap();
        assert_eq!(run.base[1], b);
        assert_eq!(run.extrapolated[0], b);
        // constant sequence afterwards: zero differences make later systems singular
        assert!(!run.solved[2]);
        assert_eq!(run.extrapolated[2], b);
        assert!(offline_anderson(|x: &[f64]| x.to_vec(), vec![0.0], 1001, 0.0).is_err());
        assert!(offline_anderson(|x: &[f64]| x.to_vec(), vec![0.0], 0, 0.0).is_err());
    }

    #[test]
    fn offline_is_exact_on_minimal_polynomial() {
        // T has 3 distinct eigenvalues: 4 differences span the whole Krylov
        // space, G is singular and the constrained solve is exact
        let q = crate::data::random_orthogonal(5, 4);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![0.1, 0.3, 0.3, 0.7, 0.7]));
        let t = &q * d * q.transpose();
        let b = DVector::from_fn(5, |i, _| (i as f64) - 1.5);
        let xstar = (DMatrix::identity(5, 5) - &t).lu().solve(&b).unwrap();
        let run = offline_anderson(
            |x: &[f64]| (&t * DVector::from_column_slice(x) + &b).as_slice().to_vec(),
            vec![0.0; 5],
            4,
            0.0,
        )
        .unwrap();
        let err = (DVector::from_column_slice(&run.extrapolated[3]) - &xstar).norm();
        assert!(err < 1e-9, "error {err}");
        let early = (DVector::from_column_slice(&run.extrapolated[2]) - &xstar).norm();
        assert!(early > 1e-4, "three differences cannot annihilate three eigenvalues");
        let base_err = (DVector::from_column_slice(&run.base[4]) - &xstar).norm();
        assert!(base_err > 1e-2);
    }

    #[test]
    fn online_window_one_is_identity() {
        // one difference: c = [1], x_e = x_k
        let run = online_anderson(|x: &[f64]| vec![0.5 * x[0] + 1.0], vec![0.0], 1, 6, 0.0, None)
            .unwrap();
        let plain: Vec<f64> = (0..=6).map(|k| 2.0 - 2.0 * 0.5f64.powi(k)).collect();
        for (it, want) in run.iterates.iter().zip(&plain) {
            assert!((it[0] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn online_window_two_lands_on_scalar_fixed_point() {
        let (rho, b) = (0.8, 0.3);
        let run =
            online_anderson(|x: &[f64]| vec![rho * x[0] + b], vec![5.0], 2, 2, 0.0, None).unwrap();
        let fixed = b / (1.0 - rho);
        assert!((run.last()[0] - fixed).abs() < 1e-12);
        assert_eq!(run.events[0].outcome, Outcome::Accepted);
    }

    #[test]
    fn online_constant_sequence_is_unsolved() {
        let run =
            online_anderson(|_: &[f64]| vec![1.0, 1.0], vec![0.0, 0.0], 2, 6, 0.0, None).unwrap();
        assert_eq!(run.last(), &[1.0, 1.0]);
        let outcomes: Vec<Outcome> = run.events.iter().map(|e| e.outcome).collect();
        // first window [0, 1, 1]: a unique minimizer exists and reproduces x
        assert_eq!(outcomes, vec![Outcome::Accepted, Outcome::Unsolved, Outcome::Unsolved]);
    }

    #[test]
    fn guard_rejects_increasing_points() {
        let guard = |x: &[f64]| -x[0];
        // extrapolation moves toward the fixed point 0; guard prefers large x
        let run = online_anderson(
            |x: &[f64]| vec![0.5 * x[0]],
            vec![1.0],
            2,
            4,
            0.0,
            Some(&guard),
        )
        .unwrap();
        assert!(run.events.iter().all(|e| e.outcome == Outcome::Rejected));
        assert!((run.last()[0] - 0.0625).abs() < 1e-15);
    }

    /// Independent route: eliminate the constraint and solve the unconstrained
    /// least-squares problem with an SVD.
    fn constrained_lsq_oracle(u: &DMatrix<f64>) -> DVector<f64> {
        let k = u.ncols();
        if k == 1 {
            return DVector::from_element(1, 1.0);
        }
        let last = u.column(k - 1).into_owned();
        let d = DMatrix::from_fn(u.nrows(), k - 1, |i, j| u[(i, j)] - last[i]);
        let w = d.svd(true, true).solve(&(-&last), 1e-14).unwrap();
        let mut c = DVector::zeros(k);
        for j in 0..k - 1 {
            c[j] = w[j];
        }
        c[k - 1] = 1.0 - w.sum();
        c
    }

    fn columns_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..=4, 5usize..=8).prop_flat_map(|(k, p)| {
            proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, p), k)
        })
    }

    proptest! {
        #[test]
        fn coefficients_minimize_residual(cols in columns_strategy()) {
            let k = cols.len();
            let p = cols[0].len();
            let res = extrapolation_coefficients(&cols, &0.0);
            prop_assume!(res.solved);
            let u = DMatrix::from_fn(p, k, |i, j| cols[j][i]);
            let oracle = constrained_lsq_oracle(&u);
            let sum: f64 = res.c.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-10);
            let got = (&u * DVector::from_column_slice(&res.c)).norm();
            let best = (&u * &oracle).norm();
            prop_assert!(got <= best * (1.0 + 1e-8) + 1e-12, "got {} best {}", got, best);
        }

        #[test]
        fn coefficients_are_scale_invariant(cols in columns_strategy(), e in -20i32..20, neg in any::<bool>()) {
            // powers of two scale exactly, so the coefficients must match bit for bit
            let s = if neg { -(2f64.powi(e)) } else { 2f64.powi(e) };
            let a = extrapolation_coefficients(&cols, &0.0);
            let scaled: Vec<Vec<f64>> = cols.iter().map(|c| c.iter().map(|v| v * s).collect()).collect();
            let b = extrapolation_coefficients(&scaled, &0.0);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn extrapolation_commutes_with_permutations(
            pts in proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, 6), 4),
            perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
        ) {
            let mut w = ExtrapolationWindow::new(3, 0.0).unwrap();
            let mut wp = ExtrapolationWindow::new(3, 0.0).unwrap();
            for x in &pts {
                w.push(x.clone());
                wp.push(perm.iter().map(|&i| x[i]).collect());
            }
            let a = w.extrapolate().unwrap();
            let b = wp.extrapolate().unwrap();
            prop_assert_eq!(a.solved, b.solved);
            if a.solved {
                for (j, &i) in perm.iter().enumerate() {
                    prop_assert!((b.point[j] - a.point[i]).abs() <= 1e-8 * (1.0 + a.point[i].abs()));
                }
            }
        }
    }
}
