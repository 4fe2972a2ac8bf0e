use std::path::PathBuf;
use std::process::ExitCode;

use acd_bench::range::{run_range, RangeOptions};
use acd_bench::reference::compute_reference;
use acd_bench::run::{reference_dir, REFERENCE_BUDGET_FACTOR};
use acd_bench::{instance, run_bench, BenchError, BenchSpec, RunOptions};
use clap::{Args, Parser, Subcommand};

/// Anderson-accelerated coordinate descent benchmarks.
#[derive(Debug, Parser)]
#[command(name = "acd", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Benchmark specification (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for synthetic data and randomized solvers.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    threads: usize,
    /// Write zero in the seconds column so outputs are reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the solver grid of a config file.
    Bench,
    /// Write numerical-range boundaries of T^q for a ridge problem.
    Range {
        /// Comma-separated powers.
        #[arg(long, value_delimiter = ',', default_value = "1,128,256,512")]
        q: Vec<usize>,
        #[arg(long, default_value_t = 128)]
        angles: usize,
        /// Condition number of the ridge Hessian.
        #[arg(long, default_value_t = 1e3)]
        kappa: f64,
        /// LibSVM file (default: a synthetic design).
        #[arg(long, value_name = "PATH")]
        dataset: Option<PathBuf>,
        #[arg(long)]
        n_features: Option<usize>,
    },
    /// Compute or inspect the reference optima of a config file.
    Ref,
    /// Validate a LibSVM file.
    ParseCheck {
        path: PathBuf,
        #[arg(long)]
        n_features: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_spec(g: &Global) -> Result<BenchSpec, BenchError> {
    let path = g
        .config
        .as_ref()
        .ok_or_else(|| BenchError::Config("--config PATH is required".into()))?;
    BenchSpec::from_file(path)
}

fn out_dir(g: &Global, spec: Option<&BenchSpec>) -> PathBuf {
    g.out
        .clone()
        .or_else(|| spec.map(|s| s.output.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn run(cli: Cli) -> Result<ExitCode, BenchError> {
    let g = &cli.global;
    match cli.command {
        Command::Bench => {
            let spec = load_spec(g)?;
            let opts = RunOptions {
                out: out_dir(g, Some(&spec)),
                seed: g.seed,
                threads: g.threads,
                timing: g.no_timing.then_some(false),
            };
            let report = run_bench(&spec, &opts)?;
            for j in &report.jobs {
                println!(
                    "{} {} {} {}: {} epochs, subopt {:.3e}{}",
                    j.dataset,
                    j.problem,
                    j.label,
                    j.solver,
                    j.epochs,
                    j.final_subopt,
                    if j.converged { "" } else { " (not converged)" }
                );
            }
            for f in &report.failures {
                eprintln!("failed: {}: {}", f.job, f.error);
            }
            println!("wrote {} files to {}", report.files.len(), opts.out.display());
            Ok(if report.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Range { q, angles, kappa, dataset, n_features } => {
            let opts = RangeOptions {
                q,
                angles,
                kappa,
                dataset,
                n_features,
                seed: g.seed.unwrap_or(0),
            };
            let out = out_dir(g, None);
            let res = run_range(&opts, &out)?;
            for r in &res.ranges {
                println!("q = {}: 1 {} W(T^q)", r.q, if r.contains_one { "in" } else { "not in" });
            }
            println!("wrote {} files to {}", res.files.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Ref => {
            let spec = load_spec(g)?;
            let dir = reference_dir(&out_dir(g, Some(&spec)));
            let min_budget = REFERENCE_BUDGET_FACTOR * spec.solvers.max_epochs;
            let mut ok = true;
            for built in instance::build_instances(&spec, g.seed.unwrap_or(spec.solvers.seed)) {
                let list = match built.instances {
                    Ok(list) => list,
                    Err(e) => {
                        eprintln!("failed: dataset {}: {e}", built.dataset);
                        ok = false;
                        continue;
                    }
                };
                for inst in list {
                    let look = compute_reference(&inst.problem, min_budget.max(1000), min_budget, Some(&dir))?;
                    let r = &look.reference;
                    ok &= r.verified;
                    println!(
                        "{}: f_star {:e} by {} in {} epochs, {}{} [{}]",
                        inst.stem(),
                        r.f_star,
                        r.producer,
                        r.epochs,
                        if r.verified { "verified" } else { "unverified" },
                        if look.cache_hit { ", cached" } else { "" },
                        look.path.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
                    );
                }
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::ParseCheck { path, n_features } => {
            match acd_core::data::read_libsvm::<f64>(&path, n_features) {
                Ok(ds) => {
                    println!(
                        "{}: {} samples, {} features, {} nonzeros",
                        path.display(),
                        ds.n_samples(),
                        ds.n_features(),
                        ds.a.nnz()
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("{}: {e}", path.display());
                    Ok(ExitCode::FAILURE)
                }
            }
        }
    }
}
