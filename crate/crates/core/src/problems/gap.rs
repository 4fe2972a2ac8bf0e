use super::{sigmoid, Problem};
use crate::scalar::{lit, Real};

/// Primal value, a dual lower bound, and their nonnegative difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport<T> {
    pub primal: T,
    pub dual: T,
    pub gap: T,
}

impl<T: Real> GapReport<T> {
    fn new(primal: T, dual: T) -> Self {
        Self { primal, dual, gap: (primal - dual).max(T::zero()) }
    }
}

/// `s log s` with the convention `0 log 0 = 0`.
fn xlogx<T: Real>(s: T) -> T {
    if s <= T::zero() {
        T::zero()
    } else {
        s * s.ln()
    }
}

fn inf_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn sq_norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum()
}

impl<T: Real> Problem<T> {
    /// Duality gap from a rescaled dual candidate built at `x`.
    ///
    /// Available for the Lasso, the elastic net and ℓ1 logistic regression;
    /// `None` otherwise.
    pub fn duality_gap(&self, x: &[T]) -> Option<GapReport<T>> {
        let z = self.predictor(x);
        self.duality_gap_with_predictor(x, &z)
    }

    /// Same as [`Problem::duality_gap`] with `z = Ax` supplied.
    pub fn duality_gap_with_predictor(&self, x: &[T], z: &[T]) -> Option<GapReport<T>> {
        let half = lit::<T>(0.5);
        let primal = self.objective_with_predictor(x, z);
        match self {
            Problem::Lasso { data, lambda } => {
                let r: Vec<T> = data.y.iter().zip(z).map(|(&y, &zi)| y - zi).collect();
                let scale = T::one() / lambda.max(inf_norm(&data.a.rmatvec(&r)));
                let dist: T = data
                    .y
                    .iter()
                    .zip(&r)
                    .map(|(&y, &ri)| {
                        let d = y - *lambda * scale * ri;
                        d * d
                    })
                    .sum();
                Some(GapReport::new(primal, half * sq_norm(&data.y) - half * dist))
            }
            Problem::ElasticNet { data, lambda, rho } => {
                let n = lit::<T>(data.n_samples() as f64);
                let mut u: Vec<T> = data.y.iter().zip(z).map(|(&y, &zi)| (y - zi) / n).collect();
                let atu = data.a.rmatvec(&u);
                let conj = if *rho > T::zero() {
                    atu.iter()
                        .map(|v| {
                            let e = (v.abs() - *lambda).max(T::zero());
                            e * e
                        })
                        .sum::<T>()
                        / (lit::<T>(2.0) * *rho)
                } else {
                    let s = T::one().max(inf_norm(&atu) / *lambda);
                    u.iter_mut().for_each(|v| *v = *v / s);
                    T::zero()
                };
                let uy: T = u.iter().zip(&data.y).map(|(&a, &b)| a * b).sum();
                Some(GapReport::new(primal, uy - half * n * sq_norm(&u) - conj))
            }
            Problem::LogRegL1 { data, lambda } => {
                let mut u: Vec<T> = data
                    .y
                    .iter()
                    .zip(z)
                    .map(|(&y, &zi)| y * sigmoid(-y * zi))
                    .collect();
                let s = T::one().max(inf_norm(&data.a.rmatvec(&u)) / *lambda);
                u.iter_mut().for_each(|v| *v = *v / s);
                let dual = -data
                    .y
                    .iter()
                    .zip(&u)
                    .map(|(&y, &ui)| {
                        let s = (y * ui).max(T::zero()).min(T::one());
                        xlogx(s) + xlogx(T::one() - s)
                    })
                    .sum::<T>();
                Some(GapReport::new(primal, dual))
            }
            _ => None,
        }
    }
}
