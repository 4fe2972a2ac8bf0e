//! Iterative solvers. Every run starts from `x = 0` and returns a [`Trace`].
//!
//! An epoch is one pass over the coordinates (or blocks) for the coordinate
//! methods, one double pass for the pseudo-symmetric variant, and one
//! gradient evaluation for the full-gradient methods.

mod coordinate;
mod first_order;
mod quadratic;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

pub use coordinate::{anderson_pcd, pcd, pcd_epoch, prcd, ResidualState, Sweep};
pub use first_order::{anderson_gd, conjugate_gradient, fista, gd, pgd};
pub use quadratic::{cd_epoch_quadratic, cdsym_epoch_quadratic};

use crate::anderson::{Outcome, DEFAULT_WINDOW};
use crate::error::{invalid, Error, Result};
use crate::problems::Problem;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Cyclic proximal coordinate descent.
    Pcd,
    /// Cyclic proximal coordinate descent with online extrapolation.
    AndersonPcd,
    /// Forward then backward coordinate sweeps.
    CdSym,
    /// Forward/backward sweeps with online extrapolation.
    AndersonCdSym,
    /// Proximal coordinate descent with uniformly sampled coordinates.
    Prcd,
    Gd,
    AndersonGd,
    Pgd,
    Fista,
    ConjugateGradient,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::Pcd,
        Algorithm::AndersonPcd,
        Algorithm::CdSym,
        Algorithm::AndersonCdSym,
        Algorithm::Prcd,
        Algorithm::Gd,
        Algorithm::AndersonGd,
        Algorithm::Pgd,
        Algorithm::Fista,
        Algorithm::ConjugateGradient,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pcd => "pcd",
            Algorithm::AndersonPcd => "anderson_pcd",
            Algorithm::CdSym => "cdsym",
            Algorithm::AndersonCdSym => "anderson_cdsym",
            Algorithm::Prcd => "prcd",
            Algorithm::Gd => "gd",
            Algorithm::AndersonGd => "anderson_gd",
            Algorithm::Pgd => "pgd",
            Algorithm::Fista => "fista",
            Algorithm::ConjugateGradient => "cg",
        }
    }

    /// True for methods whose objective can only decrease from epoch to epoch.
    pub fn is_descent(self) -> bool {
        matches!(
            self,
            Algorithm::Pcd
                | Algorithm::AndersonPcd
                | Algorithm::CdSym
                | Algorithm::AndersonCdSym
                | Algorithm::Prcd
                | Algorithm::Pgd
                | Algorithm::Gd
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| invalid(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub algorithm: Algorithm,
    /// Extrapolation window `K`.
    pub k: usize,
    pub lambda_reg: T,
    pub max_epochs: usize,
    /// Stop once the suboptimality (when `f_star` is known) or else the
    /// duality gap falls to `tol`.
    pub tol: T,
    pub seed: u64,
    pub use_guard: bool,
    /// Reference optimum used for the stopping rule.
    pub f_star: Option<T>,
    /// Evaluate the duality gap at each record.
    pub record_gap: bool,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            k: DEFAULT_WINDOW,
            lambda_reg: T::zero(),
            max_epochs: 1000,
            tol: T::from(1e-12).expect("representable"),
            seed: 0,
            use_guard: true,
            f_star: None,
            record_gap: true,
        }
    }

    pub fn with_max_epochs(mut self, max_epochs: usize) -> Self {
        self.max_epochs = max_epochs;
        self
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_window(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_f_star(mut self, f_star: T) -> Self {
        self.f_star = Some(f_star);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_guard(mut self, use_guard: bool) -> Self {
        self.use_guard = use_guard;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("K must be at least 1"));
        }
        if !(self.tol > T::zero()) {
            return Err(invalid("tol must be positive"));
        }
        if !(self.lambda_reg >= T::zero()) {
            return Err(invalid("lambda_reg must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record<T> {
    pub epoch: usize,
    /// Solver time since the start, evaluation excluded.
    pub seconds: f64,
    pub objective: T,
    pub gap: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtrapolationEvent {
    pub epoch: usize,
    pub outcome: Outcome,
}

#[derive(Debug, Clone)]
pub struct Trace<T> {
    pub algorithm: Algorithm,
    pub records: Vec<Record<T>>,
    pub x: Vec<T>,
    pub events: Vec<ExtrapolationEvent>,
    /// Largest relative drift of the incremental predictor seen at a resync.
    pub max_drift: T,
    pub converged: bool,
}

impl<T: Real> Trace<T> {
    pub fn final_objective(&self) -> T {
        self.records.last().expect("epoch 0 is always recorded").objective
    }

    pub fn epochs(&self) -> usize {
        self.records.last().map_or(0, |r| r.epoch)
    }

    /// First epoch whose objective is within `tol` of `f_star`.
    pub fn epochs_to(&self, f_star: T, tol: T) -> Option<usize> {
        self.records.iter().find(|r| r.objective - f_star <= tol).map(|r| r.epoch)
    }
}

/// Timing, recording and the stopping rule shared by all solvers.
pub(crate) struct Recorder<'a, T: Real> {
    prob: &'a Problem<T>,
    cfg: &'a SolverConfig<T>,
    trace: Trace<T>,
    elapsed: Duration,
    started: Option<Instant>,
}

impl<'a, T: Real> Recorder<'a, T> {
    pub(crate) fn new(prob: &'a Problem<T>, cfg: &'a SolverConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            prob,
            cfg,
            trace: Trace {
                algorithm: cfg.algorithm,
                records: Vec::new(),
                x: Vec::new(),
                events: Vec::new(),
                max_drift: T::zero(),
                converged: false,
            },
            elapsed: Duration::ZERO,
            started: None,
        })
    }

    pub(crate) fn start_clock(&mut self) {
        self.started = Some(Instant::now());
    }

    pub(crate) fn stop_clock(&mut self) {
        if let Some(t) = self.started.take() {
            self.elapsed += t.elapsed();
        }
    }

    pub(crate) fn event(&mut self, epoch: usize, outcome: Outcome) {
        self.trace.events.push(ExtrapolationEvent { epoch, outcome });
    }

    pub(crate) fn drift(&mut self, d: T) {
        self.trace.max_drift = self.trace.max_drift.max(d);
    }

    /// Records `x` (with `z = Ax` when already known) and reports whether to stop.
    pub(crate) fn record(&mut self, epoch: usize, x: &[T], z: Option<&[T]>) -> Result<bool> {
        self.stop_clock();
        let owned;
        let z = match z {
            Some(z) => z,
            None => {
                owned = self.prob.predictor(x);
                &owned
            }
        };
        let objective = self.prob.objective_with_predictor(x, z);
        if !objective.is_finite() {
            return Err(Error::Numeric(format!(
                "{} produced a non-finite objective at epoch {epoch}",
                self.cfg.algorithm
            )));
        }
        let gap = if self.cfg.record_gap {
            self.prob.duality_gap_with_predictor(x, z).map(|g| g.gap)
        } else {
            None
        };
        self.trace.records.push(Record {
            epoch,
            seconds: self.elapsed.as_secs_f64(),
            objective,
            gap,
        });
        let done = match (self.cfg.f_star, gap) {
            (Some(f), _) => objective - f <= self.cfg.tol,
            (None, Some(g)) => g <= self.cfg.tol,
            (None, None) => false,
        };
        self.trace.converged |= done;
        Ok(done || epoch >= self.cfg.max_epochs)
    }

    pub(crate) fn finish(mut self, x: Vec<T>) -> Trace<T> {
        self.trace.x = x;
        self.trace
    }
}

/// Runs the algorithm named in `cfg`.
pub fn solve<T: Real>(prob: &Problem<T>, cfg: &SolverConfig<T>) -> Result<Trace<T>> {
    match cfg.algorithm {
        Algorithm::Pcd => pcd(prob, cfg, Sweep::Forward),
        Algorithm::CdSym => pcd(prob, cfg, Sweep::Symmetric),
        Algorithm::AndersonPcd => anderson_pcd(prob, cfg, Sweep::Forward),
        Algorithm::AndersonCdSym => anderson_pcd(prob, cfg, Sweep::Symmetric),
        Algorithm::Prcd => prcd(prob, cfg),
        Algorithm::Gd => gd(prob, cfg),
        Algorithm::AndersonGd => anderson_gd(prob, cfg),
        Algorithm::Pgd => pgd(prob, cfg),
        Algorithm::Fista => fista(prob, cfg),
        Algorithm::ConjugateGradient => conjugate_gradient(prob, cfg),
    }
}
