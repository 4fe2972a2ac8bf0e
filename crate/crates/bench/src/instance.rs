//! Expansion of a [`BenchSpec`] into concrete problem instances.

use std::sync::Arc;

use acd_core::data::{self, Dataset};
use acd_core::fixedpoint::{self, Quadratic};
use acd_core::linalg;
use acd_core::problems::{tikhonov_for_condition, Groups, Problem};
use acd_core::{DatasetF64, ProblemF64};

use crate::config::{BenchSpec, DatasetSpec, ProblemKind};
use crate::error::{BenchError, Result};

/// One problem of the benchmark grid.
#[derive(Debug, Clone)]
pub struct Instance {
    pub dataset: String,
    /// Parameter tag such as `lam1e-2` or `lam1e-1_rho5e-1`.
    pub label: String,
    pub problem: Arc<ProblemF64>,
}

impl Instance {
    /// File stem shared by the traces and the plot of this instance.
    pub fn stem(&self) -> String {
        format!("{}__{}__{}", self.dataset, self.problem.name(), self.label)
    }
}

/// Instances built from one dataset entry, or the reason it could not be loaded.
#[derive(Debug)]
pub struct DatasetInstances {
    pub dataset: String,
    pub instances: Result<Vec<Instance>>,
}

pub fn dataset_name(ds: &DatasetSpec) -> String {
    match ds {
        DatasetSpec::Libsvm { name: Some(name), .. } => sanitize(name),
        DatasetSpec::Libsvm { path, .. } => path
            .file_stem()
            .map(|s| sanitize(&s.to_string_lossy()))
            .unwrap_or_else(|| "libsvm".into()),
        DatasetSpec::Synthetic { n, p, .. } => format!("synthetic_n{n}_p{p}"),
        DatasetSpec::Spd { p, kappa } => format!("spd_p{p}_kappa{kappa:e}"),
    }
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

pub fn build_instances(spec: &BenchSpec, seed: u64) -> Vec<DatasetInstances> {
    spec.datasets
        .iter()
        .map(|ds| DatasetInstances {
            dataset: dataset_name(ds),
            instances: instances_for(spec, ds, seed),
        })
        .collect()
}

fn instances_for(spec: &BenchSpec, ds: &DatasetSpec, seed: u64) -> Result<Vec<Instance>> {
    let name = dataset_name(ds);
    let kind = spec.problem.kind;
    let logistic = matches!(kind, ProblemKind::LogregL1 | ProblemKind::LogregL2);
    let data: DatasetF64 = match ds {
        DatasetSpec::Spd { p, kappa } => {
            let prob = spd_quadratic(*p, *kappa, seed)?;
            return Ok(vec![Instance {
                dataset: name,
                label: "spd".into(),
                problem: Arc::new(prob),
            }]);
        }
        DatasetSpec::Libsvm { path, n_features, .. } => data::read_libsvm(path, *n_features)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?,
        DatasetSpec::Synthetic { n, p, corr, snr } => {
            if logistic {
                data::gen_classification(*n, *p, *corr, seed)?
            } else {
                data::gen_correlated_gaussian(*n, *p, *corr, *snr, seed)?
            }
        }
    };
    let data = Arc::new(if logistic { data.to_binary_labels()? } else { data });
    let p = data.n_features();
    let mut out = Vec::new();
    let mut push = |label: String, problem: ProblemF64| {
        out.push(Instance {
            dataset: name.clone(),
            label,
            problem: Arc::new(problem),
        })
    };
    match kind {
        ProblemKind::Lasso | ProblemKind::LogregL1 | ProblemKind::GroupLasso | ProblemKind::Enet => {
            let groups = match kind {
                ProblemKind::GroupLasso => Some(Arc::new(Groups::contiguous(p, spec.problem.group_size)?)),
                _ => None,
            };
            let lambda_max = acd_core::problems::lambda_max_for(
                kind.name(),
                Some(data.as_ref()),
                groups.as_deref(),
            )?;
            if !(lambda_max > 0.0) {
                return Err(BenchError::Config(format!("{name}: lambda_max is zero")));
            }
            for &frac in &spec.problem.lambda_fractions {
                let lambda = frac * lambda_max;
                let tag = format!("lam{frac:e}");
                match kind {
                    ProblemKind::Lasso => push(tag, Problem::lasso(data.clone(), lambda)?),
                    ProblemKind::LogregL1 => push(tag, Problem::logreg_l1(data.clone(), lambda)?),
                    ProblemKind::GroupLasso => push(
                        tag,
                        Problem::group_lasso(data.clone(), lambda, groups.clone().expect("built above"))?,
                    ),
                    _ => {
                        for &rho in &spec.problem.rho {
                            push(
                                format!("{tag}_rho{rho:e}"),
                                Problem::elastic_net(data.clone(), lambda, rho)?,
                            );
                        }
                    }
                }
            }
        }
        ProblemKind::LogregL2 => {
            // the logistic curvature is at most a quarter of that of AᵀA
            let gamma_max = 0.25 * gram_top_eigenvalue(&data);
            for &kappa in &spec.problem.kappas {
                let lambda = tikhonov_for_condition(0.0, gamma_max, kappa)?;
                push(format!("kappa{kappa:e}"), Problem::logreg_l2(data.clone(), lambda)?);
            }
        }
        ProblemKind::Quadratic => {
            let (lo, hi) = gram_spectrum_bounds(&data)?;
            for &kappa in &spec.problem.kappas {
                let ridge = tikhonov_for_condition(lo, hi, kappa)?;
                let q = Quadratic::from_least_squares(&data.a, &data.y, ridge)?;
                push(format!("kappa{kappa:e}"), Problem::quadratic(q));
            }
        }
    }
    Ok(out)
}

fn gram_top_eigenvalue(data: &Dataset<f64>) -> f64 {
    linalg::power_iteration(data.n_features(), |v| data.a.rmatvec(&data.a.matvec(v)), 1e-10, 10_000)
}

/// Smallest and largest eigenvalues of `AᵀA`.
fn gram_spectrum_bounds(data: &Dataset<f64>) -> Result<(f64, f64)> {
    let eig = fixedpoint::eigenvalues(&data.a.gram())?;
    let lo = eig.iter().map(|z| z.re).fold(f64::INFINITY, f64::min).max(0.0);
    let hi = eig.iter().map(|z| z.re).fold(0.0, f64::max);
    Ok((lo, hi))
}

/// `½xᵀHx + bᵀx` with a log-spaced spectrum in `[1/κ, 1]` and `b = −H v`
/// for a deterministic `v`.
pub fn spd_quadratic(p: usize, kappa: f64, seed: u64) -> Result<ProblemF64> {
    if p == 0 || !(kappa >= 1.0) {
        return Err(BenchError::Config("spd needs p >= 1 and kappa >= 1".into()));
    }
    let h = data::spd_with_spectrum(&data::log_spaced_spectrum(p, kappa), seed);
    let v: Vec<f64> = (0..p).map(|j| ((j * 7919 + 13) % 101) as f64 / 50.0 - 1.0).collect();
    let b = linalg::matvec(&h, &v).into_iter().map(|x| -x).collect();
    Ok(Problem::quadratic(Quadratic::new(h, b)?))
}
