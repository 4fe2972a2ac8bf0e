//! Runs the solver grid of a [`BenchSpec`] and writes traces and plots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use acd_core::solvers::{self, Algorithm};
use acd_core::{SolverConfigF64, TraceF64};
use rayon::prelude::*;

use crate::config::BenchSpec;
use crate::error::{io_err, BenchError, Result};
use crate::instance::{build_instances, Instance};
use crate::plot::{self, Panel, Series};
use crate::reference::{compute_reference, ReferenceOptimum};

pub const CSV_HEADER: &str = "epoch,seconds,objective,subopt,gap";
/// Most negative suboptimality tolerated before the reference is reported as inconsistent.
pub const SUBOPT_FLOOR: f64 = -1e-10;
/// Reference runs get this many times the benchmark's epoch limit.
pub const REFERENCE_BUDGET_FACTOR: usize = 10;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Overrides the seed of the spec.
    pub seed: Option<u64>,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    /// Overrides `output.timing`.
    pub timing: Option<bool>,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            out: out.into(),
            seed: None,
            threads: 1,
            timing: None,
        }
    }
}

/// Outcome of one (instance, solver) job.
#[derive(Debug, Clone)]
pub struct JobSummary {
    pub dataset: String,
    pub problem: String,
    pub label: String,
    pub solver: String,
    pub epochs: usize,
    pub final_subopt: f64,
    pub converged: bool,
    pub reference_verified: bool,
    pub csv: PathBuf,
}

#[derive(Debug, Clone)]
pub struct JobFailure {
    pub job: String,
    pub error: String,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    /// Every file written, in a deterministic order.
    pub files: Vec<PathBuf>,
    pub jobs: Vec<JobSummary>,
    pub failures: Vec<JobFailure>,
}

struct InstanceOutcome {
    files: Vec<PathBuf>,
    jobs: Vec<JobSummary>,
    failures: Vec<JobFailure>,
}

pub fn reference_dir(out: &Path) -> PathBuf {
    out.join("reference")
}

pub fn run_bench(spec: &BenchSpec, opts: &RunOptions) -> Result<BenchReport> {
    spec.validate()?;
    let algorithms = spec.algorithms()?;
    let seed = opts.seed.unwrap_or(spec.solvers.seed);
    let timing = opts.timing.unwrap_or(spec.output.timing);
    std::fs::create_dir_all(&opts.out).map_err(io_err(&opts.out))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| BenchError::Config(format!("thread pool: {e}")))?;

    let mut report = BenchReport::default();
    let mut instances = Vec::new();
    for built in build_instances(spec, seed) {
        match built.instances {
            Ok(list) => instances.extend(list),
            Err(e) => report.failures.push(JobFailure {
                job: format!("dataset {}", built.dataset),
                error: e.to_string(),
            }),
        }
    }
    let ctx = Context {
        spec,
        algorithms: &algorithms,
        seed,
        timing,
        out: &opts.out,
    };
    let outcomes: Vec<InstanceOutcome> =
        pool.install(|| instances.par_iter().map(|inst| ctx.run_instance(inst)).collect());
    for o in outcomes {
        report.files.extend(o.files);
        report.jobs.extend(o.jobs);
        report.failures.extend(o.failures);
    }
    let summary = opts.out.join("summary.csv");
    std::fs::write(&summary, render_summary(&report)).map_err(io_err(&summary))?;
    report.files.push(summary);
    Ok(report)
}

struct Context<'a> {
    spec: &'a BenchSpec,
    algorithms: &'a [Algorithm],
    seed: u64,
    timing: bool,
    out: &'a Path,
}

impl Context<'_> {
    fn run_instance(&self, inst: &Instance) -> InstanceOutcome {
        let stem = inst.stem();
        let mut outcome = InstanceOutcome {
            files: Vec::new(),
            jobs: Vec::new(),
            failures: Vec::new(),
        };
        let max_epochs = self.spec.solvers.max_epochs;
        let min_budget = REFERENCE_BUDGET_FACTOR * max_epochs;
        let reference = match compute_reference(
            &inst.problem,
            min_budget.max(1000),
            min_budget,
            Some(&reference_dir(self.out)),
        ) {
            Ok(r) => r.reference,
            Err(e) => {
                outcome.failures.push(JobFailure {
                    job: format!("{stem} reference"),
                    error: e.to_string(),
                });
                return outcome;
            }
        };
        if !reference.verified {
            outcome.failures.push(JobFailure {
                job: format!("{stem} reference"),
                error: "reference budget exhausted before the optimality check passed (unverified)".into(),
            });
        }
        let results: Vec<(Algorithm, Result<TraceF64>)> = self
            .algorithms
            .par_iter()
            .map(|&alg| (alg, self.solve(inst, alg, reference.f_star)))
            .collect();
        let mut finished = Vec::new();
        for (alg, res) in results {
            let job = format!("{stem}__{alg}");
            match res.and_then(|trace| self.write_trace(inst, &reference, &trace).map(|s| (trace, s))) {
                Ok((trace, summary)) => {
                    if let Some(bad) = trace.records.iter().find(|r| r.objective - reference.f_star < SUBOPT_FLOOR) {
                        outcome.failures.push(JobFailure {
                            job: job.clone(),
                            error: format!(
                                "objective {:e} at epoch {} is below the reference {:e}",
                                bad.objective, bad.epoch, reference.f_star
                            ),
                        });
                    }
                    outcome.files.push(summary.csv.clone());
                    outcome.jobs.push(summary);
                    finished.push(trace);
                }
                Err(e) => outcome.failures.push(JobFailure { job, error: e.to_string() }),
            }
        }
        if !finished.is_empty() {
            let path = self.out.join(format!("{stem}.svg"));
            let svg = render_plot(&stem, &finished, reference.f_star, self.timing);
            match std::fs::write(&path, svg) {
                Ok(()) => outcome.files.push(path),
                Err(e) => outcome.failures.push(JobFailure {
                    job: format!("{stem} plot"),
                    error: e.to_string(),
                }),
            }
        }
        outcome
    }

    fn solve(&self, inst: &Instance, alg: Algorithm, f_star: f64) -> Result<TraceF64> {
        let s = &self.spec.solvers;
        let mut cfg = SolverConfigF64::new(alg)
            .with_window(s.k)
            .with_max_epochs(s.max_epochs)
            .with_tol(s.tol)
            .with_seed(self.seed)
            .with_guard(s.use_guard)
            .with_f_star(f_star);
        cfg.lambda_reg = s.lambda_reg;
        Ok(solvers::solve(&inst.problem, &cfg)?)
    }

    fn write_trace(&self, inst: &Instance, reference: &ReferenceOptimum, trace: &TraceF64) -> Result<JobSummary> {
        let path = self.out.join(format!("{}__{}.csv", inst.stem(), trace.algorithm));
        std::fs::write(&path, render_trace(trace, reference.f_star, self.timing)).map_err(io_err(&path))?;
        Ok(JobSummary {
            dataset: inst.dataset.clone(),
            problem: inst.problem.name().into(),
            label: inst.label.clone(),
            solver: trace.algorithm.name().into(),
            epochs: trace.epochs(),
            final_subopt: trace.final_objective() - reference.f_star,
            converged: trace.converged,
            reference_verified: reference.verified,
            csv: path,
        })
    }
}

/// CSV rows `epoch,seconds,objective,subopt,gap`; the gap is empty when undefined.
pub fn render_trace(trace: &TraceF64, f_star: f64, timing: bool) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in &trace.records {
        let secs = if timing { r.seconds } else { 0.0 };
        let _ = write!(s, "{},{secs:e},{:e},{:e},", r.epoch, r.objective, r.objective - f_star);
        if let Some(g) = r.gap {
            let _ = write!(s, "{g:e}");
        }
        s.push('\n');
    }
    s
}

fn render_plot(title: &str, traces: &[TraceF64], f_star: f64, timing: bool) -> String {
    let series = |time: bool| -> Vec<Series> {
        traces
            .iter()
            .map(|t| Series {
                name: t.algorithm.name().into(),
                points: t
                    .records
                    .iter()
                    .map(|r| (if time { r.seconds } else { r.epoch as f64 }, r.objective - f_star))
                    .collect(),
            })
            .collect()
    };
    let mut panels = vec![Panel {
        x_label: "epoch".into(),
        y_label: "suboptimality".into(),
        series: series(false),
    }];
    if timing {
        panels.push(Panel {
            x_label: "time (s)".into(),
            y_label: "suboptimality".into(),
            series: series(true),
        });
    }
    plot::render(title, &panels)
}

fn render_summary(report: &BenchReport) -> String {
    let mut s = String::from("dataset,problem,label,solver,epochs,final_subopt,converged,reference\n");
    for j in &report.jobs {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{:e},{},{}",
            j.dataset,
            j.problem,
            j.label,
            j.solver,
            j.epochs,
            j.final_subopt,
            j.converged,
            if j.reference_verified { "verified" } else { "unverified" }
        );
    }
    s
}

/// Parsed row of a trace CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub epoch: usize,
    pub seconds: f64,
    pub objective: f64,
    pub subopt: f64,
    pub gap: Option<f64>,
}

/// Reads back a file written by [`render_trace`].
pub fn parse_trace(text: &str) -> std::result::Result<Vec<TraceRow>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("missing or wrong header".into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(format!("row {}: expected 5 fields", i + 2));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 2));
            Ok(TraceRow {
                epoch: f[0].parse().map_err(|e| format!("row {}: {e}", i + 2))?,
                seconds: num(f[1])?,
                objective: num(f[2])?,
                subopt: num(f[3])?,
                gap: if f[4].is_empty() { None } else { Some(num(f[4])?) },
            })
        })
        .collect()
}
