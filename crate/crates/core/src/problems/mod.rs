//! Objectives of the form `f(Ax) + λ g(x)` and the plain quadratic.
//!
//! | variant      | data fit                  | penalty                     |
//! |--------------|---------------------------|-----------------------------|
//! | `Quadratic`  | `½ xᵀHx + ⟨b, x⟩`         | none                        |
//! | `Lasso`      | `½‖y − Ax‖²`              | `λ‖x‖₁`                     |
//! | `ElasticNet` | `(1/2n)‖y − Ax‖²`         | `λ‖x‖₁ + (ρ/2)‖x‖²`         |
//! | `LogRegL1`   | `Σ log(1 + e^{−yᵢ(Ax)ᵢ})` | `λ‖x‖₁`                     |
//! | `LogRegL2`   | `Σ log(1 + e^{−yᵢ(Ax)ᵢ})` | `(λ/2)‖x‖²`                 |
//! | `GroupLasso` | `½‖y − Ax‖²`              | `λ Σ_g ‖x_g‖`               |
//!
//! Solvers keep the linear predictor `z = Ax` (or `Hx` for the quadratic)
//! up to date and query coordinate gradients through it.

mod gap;
mod prox;

use std::sync::Arc;

pub use gap::GapReport;
pub use prox::{elastic_net_prox, prox_group, soft_threshold};

use crate::data::{col_norms_sq, Dataset};
use crate::error::{invalid, Error, Result};
use crate::fixedpoint::Quadratic;
use crate::linalg::{power_iteration, symmetric_max_eigenvalue};
use crate::scalar::{lit, Real};

/// A partition of the features into disjoint groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Groups {
    groups: Vec<Vec<usize>>,
}

impl Groups {
    /// Checks that `groups` covers `0..p` exactly once.
    pub fn new(groups: Vec<Vec<usize>>, p: usize) -> Result<Self> {
        let mut seen = vec![false; p];
        for g in &groups {
            if g.is_empty() {
                return Err(invalid("empty group"));
            }
            for &j in g {
                if j >= p || seen[j] {
                    return Err(invalid(format!("feature {j} is out of range or repeated")));
                }
                seen[j] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(invalid("groups do not cover every feature"));
        }
        Ok(Self { groups })
    }

    /// Consecutive blocks of `size` features; the last block may be shorter.
    pub fn contiguous(p: usize, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(invalid("group size must be positive"));
        }
        let groups = (0..p).step_by(size).map(|s| (s..(s + size).min(p)).collect()).collect();
        Self::new(groups, p)
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.groups.iter().map(Vec::as_slice)
    }

    pub fn get(&self, g: usize) -> &[usize] {
        &self.groups[g]
    }
}

#[derive(Debug, Clone)]
pub enum Problem<T: Real> {
    Quadratic(Quadratic<T>),
    Lasso {
        data: Arc<Dataset<T>>,
        lambda: T,
    },
    ElasticNet {
        data: Arc<Dataset<T>>,
        lambda: T,
        rho: T,
    },
    LogRegL1 {
        data: Arc<Dataset<T>>,
        lambda: T,
    },
    LogRegL2 {
        data: Arc<Dataset<T>>,
        lambda: T,
    },
    GroupLasso {
        data: Arc<Dataset<T>>,
        lambda: T,
        groups: Arc<Groups>,
    },
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if !(lambda > T::zero() && lambda.is_finite()) {
        return Err(invalid("lambda must be positive and finite"));
    }
    Ok(())
}

fn check_binary<T: Real>(data: &Dataset<T>) -> Result<()> {
    if data.y.iter().any(|&v| v != T::one() && v != -T::one()) {
        return Err(invalid("logistic problems need labels in {-1, +1}"));
    }
    Ok(())
}

#[inline]
pub(crate) fn sigmoid<T: Real>(t: T) -> T {
    if t >= T::zero() {
        T::one() / (T::one() + (-t).exp())
    } else {
        let e = t.exp();
        e / (T::one() + e)
    }
}

/// `log(1 + e^t)` without overflow.
#[inline]
fn log1p_exp<T: Real>(t: T) -> T {
    t.max(T::zero()) + (-t.abs()).exp().ln_1p()
}

impl<T: Real> Problem<T> {
    pub fn quadratic(q: Quadratic<T>) -> Self {
        Problem::Quadratic(q)
    }

    pub fn lasso(data: Arc<Dataset<T>>, lambda: T) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Problem::Lasso { data, lambda })
    }

    pub fn elastic_net(data: Arc<Dataset<T>>, lambda: T, rho: T) -> Result<Self> {
        check_lambda(lambda)?;
        if !(rho >= T::zero() && rho.is_finite()) {
            return Err(invalid("rho must be nonnegative"));
        }
        if data.n_samples() == 0 {
            return Err(invalid("elastic net needs at least one sample"));
        }
        Ok(Problem::ElasticNet { data, lambda, rho })
    }

    pub fn logreg_l1(data: Arc<Dataset<T>>, lambda: T) -> Result<Self> {
        check_lambda(lambda)?;
        check_binary(&data)?;
        Ok(Problem::LogRegL1 { data, lambda })
    }

    pub fn logreg_l2(data: Arc<Dataset<T>>, lambda: T) -> Result<Self> {
        check_lambda(lambda)?;
        check_binary(&data)?;
        Ok(Problem::LogRegL2 { data, lambda })
    }

    pub fn group_lasso(data: Arc<Dataset<T>>, lambda: T, groups: Arc<Groups>) -> Result<Self> {
        check_lambda(lambda)?;
        let covered: usize = groups.iter().map(<[usize]>::len).sum();
        if covered != data.n_features() {
            return Err(invalid("groups must partition the features"));
        }
        Ok(Problem::GroupLasso { data, lambda, groups })
    }

    /// Short tag used in file names.
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Quadratic(_) => "quadratic",
            Problem::Lasso { .. } => "lasso",
            Problem::ElasticNet { .. } => "enet",
            Problem::LogRegL1 { .. } => "logreg_l1",
            Problem::LogRegL2 { .. } => "logreg_l2",
            Problem::GroupLasso { .. } => "group_lasso",
        }
    }

    pub fn data(&self) -> Option<&Dataset<T>> {
        match self {
            Problem::Quadratic(_) => None,
            Problem::Lasso { data, .. }
            | Problem::ElasticNet { data, .. }
            | Problem::LogRegL1 { data, .. }
            | Problem::LogRegL2 { data, .. }
            | Problem::GroupLasso { data, .. } => Some(data),
        }
    }

    pub fn lambda(&self) -> Option<T> {
        match self {
            Problem::Quadratic(_) => None,
            Problem::Lasso { lambda, .. }
            | Problem::ElasticNet { lambda, .. }
            | Problem::LogRegL1 { lambda, .. }
            | Problem::LogRegL2 { lambda, .. }
            | Problem::GroupLasso { lambda, .. } => Some(*lambda),
        }
    }

    pub fn groups(&self) -> Option<&Groups> {
        match self {
            Problem::GroupLasso { groups, .. } => Some(groups),
            _ => None,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Problem::Quadratic(q) => q.dim(),
            _ => self.data().expect("data problem").n_features(),
        }
    }

    /// Length of the linear predictor `z`.
    pub fn predictor_len(&self) -> usize {
        match self {
            Problem::Quadratic(q) => q.dim(),
            _ => self.data().expect("data problem").n_samples(),
        }
    }

    /// True when the data fit is a quadratic (so every epoch is an affine map).
    pub fn is_quadratic(&self) -> bool {
        matches!(self, Problem::Quadratic(_))
    }

    /// `z = Ax`, or `Hx` for the quadratic.
    pub fn predictor(&self, x: &[T]) -> Vec<T> {
        match self {
            Problem::Quadratic(q) => crate::linalg::matvec(q.h(), x),
            _ => self.data().expect("data problem").a.matvec(x),
        }
    }

    /// `z += delta · M_{:j}` with `M` the design (or `H`).
    #[inline]
    pub fn predictor_axpy(&self, j: usize, delta: T, z: &mut [T]) {
        match self {
            Problem::Quadratic(q) => {
                let col = q.h().column(j);
                for (zi, &h) in z.iter_mut().zip(col.iter()) {
                    *zi = *zi + delta * h;
                }
            }
            _ => self.data().expect("data problem").a.col_axpy(j, delta, z),
        }
    }

    fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(invalid(format!(
                "expected {} coefficients, got {}",
                self.n_features(),
                x.len()
            )));
        }
        Ok(())
    }

    /// Data-fit value given the coefficients and their predictor.
    pub fn datafit(&self, x: &[T], z: &[T]) -> T {
        let half = lit::<T>(0.5);
        match self {
            Problem::Quadratic(q) => {
                let xz: T = x.iter().zip(z).map(|(&a, &b)| a * b).sum();
                let bx: T = x.iter().zip(q.b()).map(|(&a, &b)| a * b).sum();
                half * xz + bx
            }
            Problem::Lasso { data, .. } | Problem::GroupLasso { data, .. } => {
                half * data.y.iter().zip(z).map(|(&y, &zi)| (y - zi) * (y - zi)).sum::<T>()
            }
            Problem::ElasticNet { data, .. } => {
                let n = lit::<T>(data.n_samples() as f64);
                half * data.y.iter().zip(z).map(|(&y, &zi)| (y - zi) * (y - zi)).sum::<T>() / n
            }
            Problem::LogRegL1 { data, .. } | Problem::LogRegL2 { data, .. } => {
                data.y.iter().zip(z).map(|(&y, &zi)| log1p_exp(-y * zi)).sum()
            }
        }
    }

    /// `λ g(x)`, including the ridge term of the elastic net.
    pub fn penalty(&self, x: &[T]) -> T {
        let half = lit::<T>(0.5);
        let l1 = || x.iter().map(|v| v.abs()).sum::<T>();
        let sq = || x.iter().map(|&v| v * v).sum::<T>();
        match self {
            Problem::Quadratic(_) => T::zero(),
            Problem::Lasso { lambda, .. } | Problem::LogRegL1 { lambda, .. } => *lambda * l1(),
            Problem::ElasticNet { lambda, rho, .. } => *lambda * l1() + half * *rho * sq(),
            Problem::LogRegL2 { lambda, .. } => half * *lambda * sq(),
            Problem::GroupLasso { lambda, groups, .. } => {
                *lambda
                    * groups
                        .iter()
                        .map(|g| g.iter().map(|&j| x[j] * x[j]).sum::<T>().sqrt())
                        .sum::<T>()
            }
        }
    }

    /// Full objective from a known predictor.
    pub fn objective_with_predictor(&self, x: &[T], z: &[T]) -> T {
        self.datafit(x, z) + self.penalty(x)
    }

    pub fn objective(&self, x: &[T]) -> Result<T> {
        self.check_dim(x)?;
        let z = self.predictor(x);
        Ok(self.objective_with_predictor(x, &z))
    }

    /// Gradient of the data fit with respect to the predictor.
    ///
    /// Least squares: `z − y` (divided by `n` for the elastic net); logistic:
    /// `−yᵢ σ(−yᵢ zᵢ)`; quadratic: `z + b` in coefficient space.
    pub fn datafit_gradient(&self, z: &[T]) -> Vec<T> {
        match self {
            Problem::Quadratic(q) => z.iter().zip(q.b()).map(|(&a, &b)| a + b).collect(),
            Problem::ElasticNet { data, .. } => {
                let n = lit::<T>(data.n_samples() as f64);
                (0..z.len()).map(|i| self.sample_gradient(i, z[i]) / n).collect()
            }
            _ => (0..z.len()).map(|i| self.sample_gradient(i, z[i])).collect(),
        }
    }

    /// Derivative of the per-sample loss, without the `1/n` of the elastic net.
    #[inline]
    fn sample_gradient(&self, i: usize, zi: T) -> T {
        match self {
            Problem::Quadratic(_) => unreachable!("quadratic has no samples"),
            Problem::Lasso { data, .. }
            | Problem::GroupLasso { data, .. }
            | Problem::ElasticNet { data, .. } => zi - data.y[i],
            Problem::LogRegL1 { data, .. } | Problem::LogRegL2 { data, .. } => {
                let y = data.y[i];
                -y * sigmoid(-y * zi)
            }
        }
    }

    /// `∂_j f(Ax) = A_{:j}ᵀ ∇f(z)`, or `(Hx + b)_j` for the quadratic.
    #[inline]
    pub fn coordinate_gradient(&self, j: usize, z: &[T]) -> T {
        match self {
            Problem::Quadratic(q) => z[j] + q.b()[j],
            Problem::ElasticNet { data, .. } => {
                let (rows, vals) = data.a.col(j);
                let g: T = rows
                    .iter()
                    .zip(vals)
                    .fold(T::zero(), |acc, (&i, &a)| acc + a * (z[i] - data.y[i]));
                g / lit::<T>(data.n_samples() as f64)
            }
            Problem::Lasso { data, .. } | Problem::GroupLasso { data, .. } => {
                let (rows, vals) = data.a.col(j);
                rows.iter()
                    .zip(vals)
                    .fold(T::zero(), |acc, (&i, &a)| acc + a * (z[i] - data.y[i]))
            }
            Problem::LogRegL1 { data, .. } | Problem::LogRegL2 { data, .. } => {
                let (rows, vals) = data.a.col(j);
                rows.iter()
                    .zip(vals)
                    .fold(T::zero(), |acc, (&i, &a)| acc + a * self.sample_gradient(i, z[i]))
            }
        }
    }

    /// Full gradient of the data fit in coefficient space.
    pub fn gradient(&self, z: &[T]) -> Vec<T> {
        (0..self.n_features()).map(|j| self.coordinate_gradient(j, z)).collect()
    }

    /// Per-coordinate smoothness constants of the data fit.
    ///
    /// One entry per feature, or per group for the group Lasso. Ridge terms
    /// are handled in the proximal step, not here.
    pub fn coordinate_lipschitz(&self) -> Vec<T> {
        match self {
            Problem::Quadratic(q) => (0..q.dim()).map(|j| q.h()[(j, j)]).collect(),
            Problem::Lasso { data, .. } => col_norms_sq(&data.a),
            Problem::ElasticNet { data, .. } => {
                let n = lit::<T>(data.n_samples() as f64);
                col_norms_sq(&data.a).into_iter().map(|v| v / n).collect()
            }
            Problem::LogRegL1 { data, .. } | Problem::LogRegL2 { data, .. } => {
                let quarter = lit::<T>(0.25);
                col_norms_sq(&data.a).into_iter().map(|v| v * quarter).collect()
            }
            Problem::GroupLasso { data, groups, .. } => groups
                .iter()
                .map(|g| group_lipschitz(&data.a.select_columns(g)))
                .collect(),
        }
    }

    /// Smoothness constant of the whole data fit, by power iteration on `AᵀA` (or `H`).
    pub fn global_lipschitz(&self) -> T {
        let tol = lit::<T>(1e-10);
        match self {
            Problem::Quadratic(q) => {
                power_iteration(q.dim(), |v| crate::linalg::matvec(q.h(), v), tol, 1000)
            }
            _ => {
                let data = self.data().expect("data problem");
                let top = power_iteration(
                    data.n_features(),
                    |v| data.a.rmatvec(&data.a.matvec(v)),
                    tol,
                    1000,
                );
                let scale = match self {
                    Problem::ElasticNet { .. } => T::one() / lit::<T>(data.n_samples() as f64),
                    Problem::LogRegL1 { .. } | Problem::LogRegL2 { .. } => lit::<T>(0.25),
                    _ => T::one(),
                };
                top * scale
            }
        }
    }

    /// Coordinate update `argmin_u λ g_j(u) + (L/2)(u − v)²` for separable penalties.
    #[inline]
    pub fn prox_coordinate(&self, v: T, lipschitz: T) -> T {
        match self {
            Problem::Quadratic(_) => v,
            Problem::Lasso { lambda, .. } | Problem::LogRegL1 { lambda, .. } => {
                soft_threshold(v, *lambda / lipschitz)
            }
            Problem::ElasticNet { lambda, rho, .. } => {
                elastic_net_prox(v, *lambda / lipschitz, *rho / lipschitz)
            }
            Problem::LogRegL2 { lambda, .. } => v / (T::one() + *lambda / lipschitz),
            Problem::GroupLasso { .. } => {
                panic!("group penalties are not separable; use prox_group")
            }
        }
    }

    /// Proximal step of `λ g / lipschitz` applied to the whole vector.
    pub fn prox_full(&self, v: &mut [T], lipschitz: T) {
        match self {
            Problem::GroupLasso { lambda, groups, .. } => {
                for g in groups.iter() {
                    let block: Vec<T> = g.iter().map(|&j| v[j]).collect();
                    let out = prox_group(&block, *lambda / lipschitz);
                    for (&j, o) in g.iter().zip(out) {
                        v[j] = o;
                    }
                }
            }
            _ => v.iter_mut().for_each(|vj| *vj = self.prox_coordinate(*vj, lipschitz)),
        }
    }

    /// Smallest `λ` for which `x = 0` is optimal.
    ///
    /// Lasso: `‖Aᵀy‖∞`; elastic net: `‖Aᵀy‖∞ / n`; ℓ1 logistic: `‖Aᵀy‖∞ / 2`;
    /// group Lasso: `max_g ‖A_gᵀy‖`.
    pub fn lambda_max(&self) -> Result<T> {
        lambda_max_for(self.name(), self.data(), self.groups())
    }
}

/// `λ_max` for a problem family on the given data, independent of any `λ`.
pub fn lambda_max_for<T: Real>(kind: &str, data: Option<&Dataset<T>>, groups: Option<&Groups>) -> Result<T> {
    let data = data.ok_or_else(|| Error::Unsupported(format!("{kind} has no data term")))?;
    let aty = data.a.rmatvec(&data.y);
    let inf = aty.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    match kind {
        "lasso" => Ok(inf),
        "enet" => Ok(inf / lit::<T>(data.n_samples() as f64)),
        "logreg_l1" => Ok(inf / lit::<T>(2.0)),
        "group_lasso" => {
            let groups = groups.ok_or_else(|| invalid("group lasso needs groups"))?;
            Ok(groups
                .iter()
                .map(|g| g.iter().map(|&j| aty[j] * aty[j]).sum::<T>().sqrt())
                .fold(T::zero(), T::max))
        }
        other => Err(Error::Unsupported(format!("lambda_max is not defined for {other}"))),
    }
}

/// Largest eigenvalue of `A_gᵀA_g`.
fn group_lipschitz<T: Real>(block: &crate::data::CscMatrix<T>) -> T {
    if block.n_cols() <= 64 {
        symmetric_max_eigenvalue(&block.gram())
    } else {
        power_iteration(
            block.n_cols(),
            |v| block.rmatvec(&block.matvec(v)),
            lit::<T>(1e-12),
            10_000,
        )
    }
}

/// Ridge strength `λ` with `(γ_max + λ) / (γ_min + λ) = κ`, or 0 when the
/// data term is already better conditioned than `κ`.
pub fn tikhonov_for_condition<T: Real>(gamma_min: T, gamma_max: T, kappa: T) -> Result<T> {
    if !(kappa > T::one()) {
        return Err(invalid("target condition number must exceed 1"));
    }
    if gamma_min < T::zero() || gamma_max < gamma_min {
        return Err(invalid("curvature bounds must satisfy 0 <= min <= max"));
    }
    Ok(((gamma_max - kappa * gamma_min) / (kappa - T::one())).max(T::zero()))
}

#[cfg(test)]
mod tests;
