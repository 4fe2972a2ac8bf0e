//! Numerical range of powers of the coordinate descent iteration matrix on a
//! ridge regression problem.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use acd_core::data;
use acd_core::fixedpoint::{self, NumericalRange, Quadratic};
use acd_core::problems::tikhonov_for_condition;
use acd_core::DatasetF64;

use crate::error::{io_err, Result};
use crate::plot::escape;

#[derive(Debug, Clone)]
pub struct RangeOptions {
    pub q: Vec<usize>,
    pub angles: usize,
    /// Condition number of the ridge Hessian.
    pub kappa: f64,
    /// LibSVM file; a seeded synthetic design is used when absent.
    pub dataset: Option<PathBuf>,
    pub n_features: Option<usize>,
    pub seed: u64,
}

impl Default for RangeOptions {
    fn default() -> Self {
        Self {
            q: vec![1, 128, 256, 512],
            angles: 128,
            kappa: 1e3,
            dataset: None,
            n_features: None,
            seed: 0,
        }
    }
}

/// Default synthetic design when no dataset is given.
pub const SYNTHETIC_SHAPE: (usize, usize) = (60, 30);

pub struct RangeOutput {
    pub files: Vec<PathBuf>,
    pub ranges: Vec<NumericalRange<f64>>,
}

/// Ridge regression `½‖y − Ax‖² + (μ/2)‖x‖²` with `μ` chosen for condition number `kappa`.
pub fn ridge_quadratic(ds: &DatasetF64, kappa: f64) -> Result<Quadratic<f64>> {
    let eig = fixedpoint::eigenvalues(&ds.a.gram())?;
    let lo = eig.iter().map(|z| z.re).fold(f64::INFINITY, f64::min).max(0.0);
    let hi = eig.iter().map(|z| z.re).fold(0.0, f64::max);
    let mu = tikhonov_for_condition(lo, hi, kappa)?;
    Ok(Quadratic::from_least_squares(&ds.a, &ds.y, mu)?)
}

pub fn run_range(opts: &RangeOptions, out: &Path) -> Result<RangeOutput> {
    let ds: DatasetF64 = match &opts.dataset {
        Some(path) => data::read_libsvm(path, opts.n_features)?,
        None => data::gen_correlated_gaussian(SYNTHETIC_SHAPE.0, SYNTHETIC_SHAPE.1, 0.5, 3.0, opts.seed)?,
    };
    let quad = ridge_quadratic(&ds, opts.kappa)?;
    let t = fixedpoint::cd_iteration(&quad)?.t;
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let mut files = Vec::new();
    let mut ranges = Vec::new();
    for &q in &opts.q {
        let range = fixedpoint::numerical_range_boundary(&t, q, opts.angles)?;
        let path = out.join(format!("range_q{q}.csv"));
        let mut buf = Vec::new();
        range.write_csv(&mut buf).map_err(io_err(&path))?;
        std::fs::write(&path, buf).map_err(io_err(&path))?;
        files.push(path);
        ranges.push(range);
    }
    let path = out.join("range.svg");
    std::fs::write(&path, render_ranges(&ds.name, &ranges)).map_err(io_err(&path))?;
    files.push(path);
    Ok(RangeOutput { files, ranges })
}

fn render_ranges(name: &str, ranges: &[NumericalRange<f64>]) -> String {
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
    let size = 420.0;
    let (m, legend_h) = (50.0, 20.0 * ranges.len() as f64);
    // axes span the unit disc, which contains W(T^q) for the contractions drawn here
    let radius = ranges
        .iter()
        .flat_map(|r| r.points.iter())
        .map(|z| z.re.abs().max(z.im.abs()))
        .fold(1.0, f64::max)
        * 1.05;
    let sx = |x: f64| m + (x + radius) / (2.0 * radius) * size;
    let sy = |y: f64| m + (radius - y) / (2.0 * radius) * size;
    let mut s = String::new();
    let (w, h) = (size + 2.0 * m, size + 2.0 * m + legend_h);
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" font-family="sans-serif" font-size="12">"#
    );
    let title = format!("numerical range of T^q, {name}");
    let _ = writeln!(s, "<title>{}</title>", escape(&title));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="25" text-anchor="middle">{}</text>"#, w / 2.0, escape(&title));
    let _ = writeln!(
        s,
        r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#999999"/><line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#999999"/>"##,
        sx(-radius), sy(0.0), sx(radius), sy(0.0), sx(0.0), sy(-radius), sx(0.0), sy(radius)
    );
    let _ = writeln!(
        s,
        r##"<circle cx="{:.1}" cy="{:.1}" r="{:.1}" fill="none" stroke="#bbbbbb" stroke-dasharray="4 3"/>"##,
        sx(0.0),
        sy(0.0),
        sx(1.0) - sx(0.0)
    );
    for (k, r) in ranges.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut pts = String::new();
        for z in r.hull() {
            let _ = write!(pts, "{:.2},{:.2} ", sx(z.re), sy(z.im));
        }
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}"><title>q = {}</title></polygon>"#,
            pts.trim_end(),
            r.q
        );
        let y = size + 2.0 * m + 20.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{m}" y="{:.1}" width="14" height="10" fill="{color}"/><text x="{:.1}" y="{:.1}">q = {}{}</text>"#,
            y - 10.0,
            m + 20.0,
            y,
            r.q,
            if r.contains_one { ", contains 1" } else { "" }
        );
    }
    let _ = writeln!(
        s,
        r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="black"><title>1</title></circle>"#,
        sx(1.0),
        sy(0.0)
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_csv_per_power_and_a_plot() {
        let dir = tempfile::tempdir().unwrap();
        let opts = RangeOptions { q: vec![1, 4], angles: 24, ..Default::default() };
        let out = run_range(&opts, dir.path()).unwrap();
        let names: Vec<_> = out.files.iter().map(|f| f.file_name().unwrap().to_string_lossy().into_owned()).collect();
        assert_eq!(names, ["range_q1.csv", "range_q4.csv", "range.svg"]);
        let csv = std::fs::read_to_string(&out.files[0]).unwrap();
        assert_eq!(csv.lines().count(), 25);
        assert!(csv.starts_with("angle,re,im\n"));
    }

    #[test]
    fn ridge_condition_number() {
        let ds: DatasetF64 = data::gen_correlated_gaussian(20, 10, 0.3, 3.0, 5).unwrap();
        let q = ridge_quadratic(&ds, 5.0).unwrap();
        let eig = fixedpoint::eigenvalues(q.h()).unwrap();
        let lo = eig.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let hi = eig.iter().map(|z| z.re).fold(0.0, f64::max);
        assert!((hi / lo - 5.0).abs() < 1e-8, "{}", hi / lo);
    }
}
