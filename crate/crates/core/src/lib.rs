//! Anderson extrapolation for gradient and coordinate descent.
//!
//! The crate is organised bottom-up:
//!
//! * [`data`]: sparse design matrices, LibSVM I/O, synthetic generators.
//! * [`fixedpoint`]: the linear iterations of gradient descent, cyclic and
//!   pseudo-symmetric coordinate descent on quadratics, with spectral and
//!   numerical-range diagnostics.
//! * [`anderson`]: extrapolation coefficients, offline and online schemes.
//! * [`problems`]: objectives, gradients, proximal operators, `λ_max` and
//!   duality gaps.
//! * [`solvers`]: proximal coordinate descent with and without extrapolation
//!   and the first-order baselines.
//!
//! Numerical code is generic over the scalar type. The aliases below fix it
//! to `f64`, which is what the benchmark harness uses.

// `!(a > b)` is written on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anderson;
pub mod data;
mod error;
pub mod fixedpoint;
pub mod linalg;
pub mod problems;
pub mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::{rational, Field, Real};

pub use num_rational::BigRational;

pub type CscMatrixF64 = data::CscMatrix<f64>;
pub type DatasetF64 = data::Dataset<f64>;
pub type QuadraticF64 = fixedpoint::Quadratic<f64>;
pub type LinearIterationF64 = fixedpoint::LinearIteration<f64>;
pub type ProblemF64 = problems::Problem<f64>;
pub type SolverConfigF64 = solvers::SolverConfig<f64>;
pub type TraceF64 = solvers::Trace<f64>;

/// Exact quadratic, for rate checks free of rounding.
pub type QuadraticExact = fixedpoint::Quadratic<BigRational>;
pub type LinearIterationExact = fixedpoint::LinearIteration<BigRational>;
