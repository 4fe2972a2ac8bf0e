//! Reference optima, cached on disk under a fingerprint of the problem.
//!
//! A cache file `<fingerprint>.ref` is plain text:
//!
//! ```text
//! fingerprint <hex>
//! problem lasso
//! producer anderson_pcd 412
//! status verified
//! f_star -1.2345e1
//! gap 3.1e-13
//! x 0e0 1.5e-1 ...
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use acd_core::solvers::{self, Algorithm, ResidualState, Sweep};
use acd_core::{ProblemF64, SolverConfigF64};
use sha2::{Digest, Sha256};

use crate::error::{io_err, BenchError, Result};

/// Gap (relative to `max(1, |f(0)|)`) the reference run aims for.
pub const TARGET_GAP: f64 = 1e-12;
/// Gap (relative to `max(1, |f*|)`) below which a reference counts as verified.
pub const VERIFIED_GAP: f64 = 1e-10;
/// Fixed-point residual accepted for problems without a duality gap.
pub const VERIFIED_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceOptimum {
    pub fingerprint: String,
    pub problem: String,
    pub f_star: f64,
    pub x_star: Vec<f64>,
    /// Solver tag, e.g. `anderson_pcd` or `direct_solve`.
    pub producer: String,
    pub epochs: usize,
    /// Duality gap at `x_star`, when defined.
    pub gap: Option<f64>,
    /// Whether the optimality certificate met its threshold.
    pub verified: bool,
}

/// Result of [`compute_reference`], telling whether the cache was used.
#[derive(Debug, Clone)]
pub struct ReferenceLookup {
    pub reference: ReferenceOptimum,
    pub cache_hit: bool,
    pub path: Option<PathBuf>,
}

/// Hex SHA-256 of the problem kind, parameters and data.
pub fn fingerprint(prob: &ProblemF64) -> String {
    let mut h = Sha256::new();
    let put_f = |h: &mut Sha256, v: &[f64]| {
        h.update((v.len() as u64).to_le_bytes());
        for x in v {
            h.update(x.to_bits().to_le_bytes());
        }
    };
    let put_u = |h: &mut Sha256, v: &[usize]| {
        h.update((v.len() as u64).to_le_bytes());
        for x in v {
            h.update((*x as u64).to_le_bytes());
        }
    };
    h.update(prob.name().as_bytes());
    h.update([0]);
    match prob {
        ProblemF64::Quadratic(q) => {
            put_f(&mut h, &[q.dim() as f64]);
            put_f(&mut h, q.h().as_slice());
            put_f(&mut h, q.b());
        }
        ProblemF64::ElasticNet { lambda, rho, .. } => put_f(&mut h, &[*lambda, *rho]),
        ProblemF64::GroupLasso { lambda, groups, .. } => {
            put_f(&mut h, &[*lambda]);
            for g in groups.iter() {
                put_u(&mut h, g);
            }
        }
        ProblemF64::Lasso { lambda, .. }
        | ProblemF64::LogRegL1 { lambda, .. }
        | ProblemF64::LogRegL2 { lambda, .. } => put_f(&mut h, &[*lambda]),
    }
    if let Some(d) = prob.data() {
        put_u(&mut h, &[d.a.n_rows(), d.a.n_cols()]);
        put_u(&mut h, d.a.col_ptr());
        put_u(&mut h, d.a.row_idx());
        put_f(&mut h, d.a.values());
        put_f(&mut h, &d.y);
    }
    hex::encode(h.finalize())
}

/// Solves `prob` to high accuracy, or loads the cached answer.
///
/// `budget` is the epoch limit of the reference run and must be at least
/// `min_budget` (ten times the benchmark's epoch limit). A run that exhausts
/// the budget is still stored, flagged as unverified.
pub fn compute_reference(
    prob: &ProblemF64,
    budget: usize,
    min_budget: usize,
    cache_dir: Option<&Path>,
) -> Result<ReferenceLookup> {
    if budget < min_budget {
        return Err(BenchError::Config(format!(
            "reference budget {budget} is below the required {min_budget} epochs"
        )));
    }
    let fp = fingerprint(prob);
    let path = cache_dir.map(|d| d.join(format!("{fp}.ref")));
    if let Some(path) = &path {
        if path.exists() {
            let reference = load(path)?;
            if reference.fingerprint != fp {
                return Err(BenchError::Cache {
                    path: path.clone(),
                    message: "fingerprint does not match the file name".into(),
                });
            }
            return Ok(ReferenceLookup {
                reference,
                cache_hit: true,
                path: Some(path.clone()),
            });
        }
    }
    let reference = solve_reference(prob, budget, fp)?;
    if let Some(path) = &path {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        // write then rename so concurrent readers never see a partial file
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        std::fs::write(&tmp, render(&reference)).map_err(io_err(&tmp))?;
        std::fs::rename(&tmp, path).map_err(io_err(path))?;
    }
    Ok(ReferenceLookup {
        reference,
        cache_hit: false,
        path,
    })
}

fn solve_reference(prob: &ProblemF64, budget: usize, fingerprint: String) -> Result<ReferenceOptimum> {
    if let ProblemF64::Quadratic(q) = prob {
        let x = q.minimizer()?;
        return Ok(ReferenceOptimum {
            fingerprint,
            problem: prob.name().into(),
            f_star: q.objective(&x),
            x_star: x,
            producer: "direct_solve".into(),
            epochs: 0,
            gap: None,
            verified: true,
        });
    }
    let f0 = prob.objective(&vec![0.0; prob.n_features()])?;
    let mut cfg = SolverConfigF64::new(Algorithm::AndersonPcd)
        .with_max_epochs(budget)
        .with_tol(TARGET_GAP * f0.abs().max(1.0));
    cfg.record_gap = true;
    let trace = solvers::solve(prob, &cfg)?;
    let x = trace.x;
    let f_star = prob.objective(&x)?;
    let gap = prob.duality_gap(&x).map(|g| g.gap);
    let verified = match gap {
        Some(g) => g <= VERIFIED_GAP * f_star.abs().max(1.0),
        None => fixed_point_residual(prob, &x) <= VERIFIED_RESIDUAL * norm(&x).max(1.0),
    };
    Ok(ReferenceOptimum {
        fingerprint,
        problem: prob.name().into(),
        f_star,
        x_star: x,
        producer: Algorithm::AndersonPcd.name().into(),
        epochs: trace.records.last().map_or(0, |r| r.epoch),
        gap,
        verified,
    })
}

/// `‖x − PCD(x)‖`: zero exactly at a minimizer.
fn fixed_point_residual(prob: &ProblemF64, x: &[f64]) -> f64 {
    let lips = prob.coordinate_lipschitz();
    let mut y = x.to_vec();
    let mut state = ResidualState::new(prob, &y);
    solvers::pcd_epoch(prob, &lips, &mut y, &mut state, Sweep::Forward);
    norm(&x.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn render(r: &ReferenceOptimum) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "fingerprint {}", r.fingerprint);
    let _ = writeln!(s, "problem {}", r.problem);
    let _ = writeln!(s, "producer {} {}", r.producer, r.epochs);
    let _ = writeln!(s, "status {}", if r.verified { "verified" } else { "unverified" });
    let _ = writeln!(s, "f_star {:e}", r.f_star);
    match r.gap {
        Some(g) => {
            let _ = writeln!(s, "gap {g:e}");
        }
        None => s.push_str("gap none\n"),
    }
    s.push('x');
    for v in &r.x_star {
        let _ = write!(s, " {v:e}");
    }
    s.push('\n');
    s
}

pub fn load(path: &Path) -> Result<ReferenceOptimum> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse(&text).map_err(|message| BenchError::Cache {
        path: path.to_path_buf(),
        message,
    })
}

pub fn parse(text: &str) -> std::result::Result<ReferenceOptimum, String> {
    let mut fields = std::collections::HashMap::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        if fields.insert(key, rest).is_some() {
            return Err(format!("duplicate key '{key}'"));
        }
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| format!("missing key '{k}'"));
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("bad number '{s}': {e}"));
    let (producer, epochs) = get("producer")?
        .split_once(' ')
        .ok_or_else(|| "producer needs a solver and an epoch count".to_string())?;
    let verified = match get("status")? {
        "verified" => true,
        "unverified" => false,
        other => return Err(format!("unknown status '{other}'")),
    };
    let gap = match get("gap")? {
        "none" => None,
        g => Some(num(g)?),
    };
    Ok(ReferenceOptimum {
        fingerprint: get("fingerprint")?.to_string(),
        problem: get("problem")?.to_string(),
        f_star: num(get("f_star")?)?,
        x_star: get("x")?.split_whitespace().map(num).collect::<std::result::Result<_, _>>()?,
        producer: producer.to_string(),
        epochs: epochs.parse().map_err(|e| format!("bad epoch count: {e}"))?,
        gap,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use acd_core::data::{CscMatrix, Dataset};
    use acd_core::problems::{soft_threshold, Problem};
    use acd_core::QuadraticF64;

    use super::*;

    fn dense(rows: &[&[f64]]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    fn csc(rows: &[Vec<f64>]) -> CscMatrix<f64> {
        let (n, p) = (rows.len(), rows[0].len());
        let mut col_ptr = vec![0];
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        for j in 0..p {
            for (i, r) in rows.iter().enumerate() {
                if r[j] != 0.0 {
                    row_idx.push(i);
                    values.push(r[j]);
                }
            }
            col_ptr.push(row_idx.len());
        }
        CscMatrix::try_new(n, p, col_ptr, row_idx, values).unwrap()
    }

    /// Lasso with orthonormal columns: `x* = ST(Aᵀy, λ)`.
    fn orthogonal_lasso() -> (ProblemF64, f64) {
        let s = 1.0 / 2f64.sqrt();
        let a = dense(&[&[s, 0.0, 0.0], &[s, 0.0, 0.0], &[0.0, 0.6, 0.8], &[0.0, 0.8, -0.6]]);
        let y = vec![2.0, 0.5, -1.0, 3.0];
        let lambda = 0.4;
        let data = Dataset::new(csc(&a), y.clone(), "ortho").unwrap();
        let aty = data.a.rmatvec(&y);
        let x: Vec<f64> = aty.iter().map(|&v| soft_threshold(v, lambda)).collect();
        let ax = data.a.matvec(&x);
        let f = 0.5 * y.iter().zip(&ax).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            + lambda * x.iter().map(|v| v.abs()).sum::<f64>();
        (Problem::lasso(Arc::new(data), lambda).unwrap(), f)
    }

    #[test]
    fn orthogonal_lasso_matches_closed_form() {
        let (prob, f) = orthogonal_lasso();
        let r = compute_reference(&prob, 1000, 1000, None).unwrap().reference;
        assert!((r.f_star - f).abs() <= 1e-12, "{} vs {f}", r.f_star);
        assert!(r.verified);
        assert_eq!(r.producer, "anderson_pcd");
    }

    #[test]
    fn quadratic_matches_direct_solve() {
        let h = acd_core::data::spd_with_spectrum(&[0.01, 0.5, 1.0, 2.0], 9);
        let q = QuadraticF64::new(h, vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let x = q.minimizer().unwrap();
        let f = q.objective(&x);
        let r = compute_reference(&Problem::quadratic(q), 1000, 10, None).unwrap().reference;
        assert!((r.f_star - f).abs() <= 1e-10);
        assert_eq!(r.producer, "direct_solve");
    }

    #[test]
    fn second_call_hits_the_cache() {
        let dir = tempfile::tempdir().unwrap();
        let (prob, _) = orthogonal_lasso();
        let first = compute_reference(&prob, 1000, 1000, Some(dir.path())).unwrap();
        let second = compute_reference(&prob, 1000, 1000, Some(dir.path())).unwrap();
        assert!(!first.cache_hit && second.cache_hit);
        assert_eq!(first.reference, second.reference);
        assert_eq!(first.reference.f_star.to_bits(), second.reference.f_star.to_bits());
        let name = second.path.unwrap().file_name().unwrap().to_string_lossy().into_owned();
        assert_eq!(name, format!("{}.ref", fingerprint(&prob)));
    }

    #[test]
    fn small_budget_is_rejected() {
        let (prob, _) = orthogonal_lasso();
        assert!(compute_reference(&prob, 99, 100, None).is_err());
    }

    #[test]
    fn exhausted_budget_is_flagged() {
        let data = acd_core::data::gen_correlated_gaussian::<f64>(40, 60, 0.9, 3.0, 1).unwrap();
        let data = Arc::new(data);
        let lmax = acd_core::problems::lambda_max_for("lasso", Some(data.as_ref()), None).unwrap();
        let prob = Problem::lasso(data, lmax / 1000.0).unwrap();
        let r = compute_reference(&prob, 2, 1, None).unwrap().reference;
        assert!(!r.verified);
        assert_eq!(r.epochs, 2);
        assert!(render(&r).contains("status unverified"));
    }

    #[test]
    fn fingerprint_depends_on_parameters() {
        let (a, _) = orthogonal_lasso();
        let data = Arc::new(a.data().unwrap().clone());
        let b = Problem::lasso(data.clone(), 0.41).unwrap();
        let c = Problem::elastic_net(data, 0.4, 0.0).unwrap();
        let fps = [fingerprint(&a), fingerprint(&b), fingerprint(&c)];
        assert_eq!(fps[0].len(), 64);
        assert!(fps[0] != fps[1] && fps[0] != fps[2] && fps[1] != fps[2]);
        assert_eq!(fingerprint(&a), fps[0]);
    }

    #[test]
    fn render_parse_round_trip() {
        let r = ReferenceOptimum {
            fingerprint: "ab".into(),
            problem: "lasso".into(),
            f_star: 0.1 + 0.2,
            x_star: vec![1.0 / 3.0, -0.0, 5e-300],
            producer: "anderson_pcd".into(),
            epochs: 17,
            gap: Some(1e-13),
            verified: true,
        };
        let back = parse(&render(&r)).unwrap();
        assert_eq!(back, r);
        assert!(parse("problem lasso\n").is_err());
        assert!(parse(&render(&r).replace("verified", "maybe")).is_err());
    }
}
