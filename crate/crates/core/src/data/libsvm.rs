//! LibSVM text format.
//!
//! ```text
//! 1 1:2.0 3:-1.0   # comment
//! -1 2:4.0
//! ```
//!
//! Indices are 1-based on disk and 0-based in memory. Gzip input is detected
//! from its magic bytes.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;

use super::{CscMatrix, Dataset};
use crate::error::{Error, Result};
use crate::scalar::Real;

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses LibSVM text.
///
/// `n_features` fixes the column count; indices beyond it are an error and
/// unused trailing columns are kept empty. Without it the width is the
/// largest index seen.
pub fn parse_libsvm<T: Real, R: Read>(mut reader: R, n_features: Option<usize>) -> Result<Dataset<T>> {
    let mut raw = Vec::new();
    reader.read_to_end(&mut raw)?;
    if raw.starts_with(&GZIP_MAGIC) {
        let mut inflated = Vec::new();
        GzDecoder::new(raw.as_slice()).read_to_end(&mut inflated)?;
        raw = inflated;
    }
    let text = String::from_utf8(raw).map_err(|e| {
        let line = 1 + e.as_bytes()[..e.utf8_error().valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count();
        parse_err(line, "input is not valid UTF-8")
    })?;

    let mut labels = Vec::new();
    let mut rows: Vec<Vec<(usize, T)>> = Vec::new();
    let mut width = 0usize;
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(lineno, format!("malformed label `{label_tok}`")))?;
        if !label.is_finite() {
            return Err(parse_err(lineno, "label must be finite"));
        }
        let mut row = Vec::new();
        let mut last: Option<usize> = None;
        for tok in tokens {
            let (idx_s, val_s) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("malformed token `{tok}`")))?;
            let idx: i64 = idx_s
                .parse()
                .map_err(|_| parse_err(lineno, format!("malformed index in `{tok}`")))?;
            if idx <= 0 {
                return Err(parse_err(lineno, format!("index must be at least 1, got {idx}")));
            }
            let col = (idx - 1) as usize;
            if let Some(prev) = last {
                if col <= prev {
                    return Err(parse_err(
                        lineno,
                        format!("non-increasing index {idx} after {}", prev + 1),
                    ));
                }
            }
            last = Some(col);
            if let Some(p) = n_features {
                if col >= p {
                    return Err(parse_err(
                        lineno,
                        format!("index {idx} exceeds declared dimension {p}"),
                    ));
                }
            }
            let val: f64 = val_s
                .parse()
                .map_err(|_| parse_err(lineno, format!("malformed value in `{tok}`")))?;
            if !val.is_finite() {
                return Err(parse_err(lineno, format!("non-finite value in `{tok}`")));
            }
            width = width.max(col + 1);
            if val != 0.0 {
                row.push((col, T::from_f64_lossy(val)));
            }
        }
        labels.push(T::from_f64_lossy(label));
        rows.push(row);
    }
    let n_cols = n_features.unwrap_or(width);
    let a = CscMatrix::from_sorted_rows(n_cols, &rows);
    Dataset::new(a, labels, "libsvm")
}

/// Reads a LibSVM file (plain or gzip).
pub fn read_libsvm<T: Real>(path: impl AsRef<Path>, n_features: Option<usize>) -> Result<Dataset<T>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let mut ds = parse_libsvm(BufReader::new(file), n_features)?;
    ds.name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "libsvm".into());
    Ok(ds)
}

/// Writes a dataset in canonical LibSVM form (sorted indices, no zeros).
pub fn write_libsvm<T: Real, W: Write>(ds: &Dataset<T>, mut out: W) -> Result<()> {
    let a = &ds.a;
    let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); a.n_rows()];
    for j in 0..a.n_cols() {
        let (ri, vals) = a.col(j);
        for (&i, &v) in ri.iter().zip(vals) {
            rows[i].push((j, v));
        }
    }
    for (label, row) in ds.y.iter().zip(&rows) {
        write!(out, "{}", label.to_f64_lossy())?;
        for (j, v) in row {
            write!(out, " {}:{}", j + 1, v.to_f64_lossy())?;
        }
        writeln!(out)?;
    }
    Ok(())
}
