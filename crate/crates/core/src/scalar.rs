//! Scalar abstractions.
//!
//! Two levels are used throughout the crate:
//!
//! * [`Field`] is the minimal ordered-field interface. It is implemented by
//!   `f32`, `f64` and [`BigRational`], so linear fixed-point iterations and the
//!   extrapolation engine can run in exact arithmetic.
//! * [`Real`] adds `num_traits::Float` for everything that needs square
//!   roots, exponentials or logarithms (proximal operators, logistic losses,
//!   the solvers).
//!
//! Eigenvalue-based diagnostics additionally require `nalgebra::RealField`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// An ordered field with conversions to and from `f64`.
pub trait Field:
    Clone + PartialOrd + Debug + Display + Num + FromPrimitive + ToPrimitive + 'static
{
    /// Ratio of Cholesky diagonal entries below which a symmetric system is
    /// declared singular.
    ///
    /// Zero for exact types: only a vanishing pivot counts as singular.
    fn singular_threshold() -> Self;

    /// `false` for NaN and infinities; exact types are always finite.
    fn is_finite_value(&self) -> bool {
        true
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to every Field")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Solves `a x = rhs` for symmetric `a`.
    ///
    /// Returns `None` when `a` is not positive definite to within
    /// [`Field::singular_threshold`]; `floor` is a lower bound on the scale
    /// used in that test. The default is an LDLᵀ factorization.
    fn solve_symmetric(a: &[Vec<Self>], rhs: &[Self], floor: &Self) -> Option<Vec<Self>> {
        crate::anderson::ldl_solve(a, rhs, floor)
    }

    fn magnitude(&self) -> Self {
        if *self < Self::zero() {
            Self::zero() - self.clone()
        } else {
            self.clone()
        }
    }
}

/// Floating-point scalars used by the solvers.
pub trait Real: Field + Float + Copy + Send + Sync + LowerExp + Sum {}

impl<T> Real for T where T: Field + Float + Copy + Send + Sync + LowerExp + Sum {}

impl Field for f64 {
    fn singular_threshold() -> Self {
        1e-12
    }
    fn is_finite_value(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Field for f32 {
    fn singular_threshold() -> Self {
        1e-12
    }
    fn is_finite_value(&self) -> bool {
        f32::is_finite(*self)
    }
}

impl Field for BigRational {
    fn singular_threshold() -> Self {
        BigRational::zero()
    }

    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_float(v).expect("finite f64 converts to a rational")
    }

    /// Fraction-free Gaussian elimination on the rows scaled to integers.
    ///
    /// Rational LDLᵀ spends most of its time in gcd reductions of entries
    /// that grow with the dimension; here only exact integer divisions occur
    /// until the final `k` quotients.
    fn solve_symmetric(a: &[Vec<Self>], rhs: &[Self], _floor: &Self) -> Option<Vec<Self>> {
        let k = a.len();
        let mut m: Vec<Vec<BigInt>> = a
            .iter()
            .zip(rhs)
            .map(|(row, r)| {
                let scale = row
                    .iter()
                    .chain(std::iter::once(r))
                    .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                row.iter()
                    .chain(std::iter::once(r))
                    .map(|v| v.numer() * (&scale / v.denom()))
                    .collect()
            })
            .collect();
        // positive row scaling keeps the signs of the leading minors, which
        // are the pivots here
        let mut prev = BigInt::one();
        for s in 0..k {
            if !m[s][s].is_positive() {
                return None;
            }
            for i in s + 1..k {
                for j in s + 1..=k {
                    m[i][j] = (&m[s][s] * &m[i][j] - &m[i][s] * &m[s][j]) / &prev;
                }
                m[i][s] = BigInt::zero();
            }
            prev = m[s][s].clone();
        }
        // back substitution on det(a)·x, which is integral
        let det = prev;
        let mut x = vec![BigInt::zero(); k];
        for i in (0..k).rev() {
            let mut v = &m[i][k] * &det;
            for j in i + 1..k {
                v -= &m[i][j] * &x[j];
            }
            x[i] = v / &m[i][i];
        }
        Some(x.into_iter().map(|xi| BigRational::new(xi, det.clone())).collect())
    }
}

/// Exact rational `num / den`.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[inline]
pub(crate) fn lit<T: Field>(v: f64) -> T {
    T::from_f64_lossy(v)
}
