//! Benchmark specification, read from a TOML file.
//!
//! ```toml
//! [[dataset]]
//! kind = "libsvm"                 # or "synthetic", "spd"
//! path = "../data/sample_regression.libsvm"
//!
//! [problem]
//! kind = "lasso"                  # enet, logreg_l1, logreg_l2, group_lasso, quadratic
//! lambda_fractions = [0.1, 0.01]  # multiples of lambda_max
//!
//! [solvers]
//! algorithms = ["pcd", "anderson_pcd", "pgd", "fista"]
//! max_epochs = 200
//! ```
//!
//! Relative dataset paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use acd_core::solvers::Algorithm;
use serde::Deserialize;

use crate::error::{io_err, BenchError, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(rename = "dataset")]
    pub datasets: Vec<DatasetSpec>,
    pub problem: ProblemSpec,
    pub solvers: SolverSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    Libsvm {
        path: PathBuf,
        /// Keep (or pad to) this many features, in file order.
        n_features: Option<usize>,
        name: Option<String>,
    },
    Synthetic {
        n: usize,
        p: usize,
        #[serde(default = "default_corr")]
        corr: f64,
        /// Signal-to-noise ratio of the regression target; logistic
        /// problems draw binary labels instead.
        #[serde(default = "default_snr")]
        snr: f64,
    },
    /// A quadratic with a log-spaced spectrum of condition number `kappa`.
    Spd { p: usize, kappa: f64 },
}

fn default_corr() -> f64 {
    0.5
}

fn default_snr() -> f64 {
    3.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Lasso,
    Enet,
    LogregL1,
    LogregL2,
    GroupLasso,
    Quadratic,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Lasso => "lasso",
            ProblemKind::Enet => "enet",
            ProblemKind::LogregL1 => "logreg_l1",
            ProblemKind::LogregL2 => "logreg_l2",
            ProblemKind::GroupLasso => "group_lasso",
            ProblemKind::Quadratic => "quadratic",
        }
    }

    /// Whether `λ` is given as a fraction of `λ_max`.
    pub fn uses_lambda_max(self) -> bool {
        matches!(
            self,
            ProblemKind::Lasso | ProblemKind::Enet | ProblemKind::LogregL1 | ProblemKind::GroupLasso
        )
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// `λ / λ_max` grid for the ℓ1-type problems.
    #[serde(default)]
    pub lambda_fractions: Vec<f64>,
    /// Ridge strengths for the elastic net.
    #[serde(default)]
    pub rho: Vec<f64>,
    /// Target condition numbers for `logreg_l2` and least-squares quadratics.
    #[serde(default)]
    pub kappas: Vec<f64>,
    #[serde(default = "default_group_size")]
    pub group_size: usize,
}

fn default_group_size() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub algorithms: Vec<String>,
    #[serde(default = "default_window")]
    pub k: usize,
    #[serde(default)]
    pub lambda_reg: f64,
    #[serde(default = "default_max_epochs")]
    pub max_epochs: usize,
    /// Suboptimality at which a run stops early.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub use_guard: bool,
}

fn default_window() -> usize {
    acd_core::anderson::DEFAULT_WINDOW
}

fn default_max_epochs() -> usize {
    200
}

fn default_tol() -> f64 {
    1e-12
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Write measured seconds; when false the column is zero so files are
    /// byte-for-byte reproducible.
    #[serde(default = "default_true")]
    pub timing: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("results"),
            timing: true,
        }
    }
}

impl BenchSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: BenchSpec = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Reads a spec and resolves relative dataset paths against its directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let mut spec = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for ds in &mut spec.datasets {
            if let DatasetSpec::Libsvm { path, .. } = ds {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        Ok(spec)
    }

    pub fn algorithms(&self) -> Result<Vec<Algorithm>> {
        self.solvers
            .algorithms
            .iter()
            .map(|a| a.parse().map_err(BenchError::from))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(BenchError::Config(m.to_string()));
        if self.datasets.is_empty() {
            return fail("at least one [[dataset]] is required");
        }
        if self.solvers.algorithms.is_empty() {
            return fail("at least one solver is required");
        }
        self.algorithms()?;
        if self.solvers.k == 0 {
            return fail("k must be at least 1");
        }
        if !(self.solvers.tol > 0.0) {
            return fail("tol must be positive");
        }
        if self.solvers.max_epochs == 0 {
            return fail("max_epochs must be positive");
        }
        let p = &self.problem;
        if p.kind.uses_lambda_max() {
            if p.lambda_fractions.is_empty() {
                return fail("lambda_fractions must not be empty");
            }
            if p.lambda_fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
                return fail("lambda fractions must lie in (0, 1]");
            }
        }
        if p.kind == ProblemKind::Enet && p.rho.is_empty() {
            return fail("enet needs a rho grid");
        }
        if p.rho.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
            return fail("rho values must be nonnegative");
        }
        if p.kind == ProblemKind::LogregL2 && p.kappas.is_empty() {
            return fail("logreg_l2 needs a kappas grid");
        }
        if p.kappas.iter().any(|&k| !(k > 1.0)) {
            return fail("kappas must exceed 1");
        }
        if p.kind == ProblemKind::GroupLasso && p.group_size == 0 {
            return fail("group_size must be positive");
        }
        for ds in &self.datasets {
            if matches!(ds, DatasetSpec::Spd { .. }) && p.kind != ProblemKind::Quadratic {
                return fail("spd datasets only define quadratic problems");
            }
        }
        Ok(())
    }
}
