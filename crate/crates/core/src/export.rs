//! Text serialization of matrices: CSV and JSON with 17 significant digits.
//!
//! CSV files start with a two-line header, `kind,N,index_base` and the
//! matching values, followed by one line per matrix row. Complex matrices
//! use two columns per entry (real, imaginary).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::extrapolate::SumConfig;
use crate::fmatrix::FMatrix;
use crate::vertex::NeumannFamily;
use crate::Complex;

/// `x` in scientific notation with 17 significant digits, which round-trips
/// every finite `f64`.
pub fn sci17(x: f64) -> String {
    // normalize -0 so output does not depend on how a zero was produced
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Format(format!("cannot serialize non-finite value {x}")))
    }
}

fn header(out: &mut String, kind: &str, n: usize, index_base: usize) {
    let _ = writeln!(out, "kind,N,index_base");
    let _ = writeln!(out, "{kind},{n},{index_base}");
}

/// CSV text for a real matrix.
pub fn real_csv(kind: &str, n: usize, index_base: usize, m: &DMatrix<f64>) -> Result<String> {
    let mut out = String::new();
    header(&mut out, kind, n, index_base);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&sci17(finite(m[(i, j)])?));
        }
        out.push('\n');
    }
    Ok(out)
}

/// CSV text for a complex matrix, real and imaginary parts side by side.
pub fn complex_csv(kind: &str, n: usize, index_base: usize, m: &DMatrix<Complex>) -> Result<String> {
    let mut out = String::new();
    header(&mut out, kind, n, index_base);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            let z = m[(i, j)];
            out.push_str(&sci17(finite(z.re)?));
            out.push(',');
            out.push_str(&sci17(finite(z.im)?));
        }
        out.push('\n');
    }
    Ok(out)
}

fn raw(text: String) -> Box<RawValue> {
    RawValue::from_string(text).expect("generated JSON is well formed")
}

/// JSON number with 17 significant digits.
pub fn json_number(x: f64) -> Result<Box<RawValue>> {
    Ok(raw(sci17(finite(x)?)))
}

/// JSON array of numbers.
pub fn json_vector(v: &[f64]) -> Result<Box<RawValue>> {
    let mut out = String::from("[");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&sci17(finite(*x)?));
    }
    out.push(']');
    Ok(raw(out))
}

/// Row-major nested JSON array of a real matrix.
pub fn json_real_matrix(m: &DMatrix<f64>) -> Result<Box<RawValue>> {
    let mut out = String::from("[");
    for i in 0..m.nrows() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&sci17(finite(m[(i, j)])?));
        }
        out.push(']');
    }
    out.push(']');
    Ok(raw(out))
}

/// Row-major nested JSON array of `[re, im]` pairs.
pub fn json_complex_matrix(m: &DMatrix<Complex>) -> Result<Box<RawValue>> {
    let mut out = String::from("[");
    for i in 0..m.nrows() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            let z = m[(i, j)];
            let _ = write!(out, "[{},{}]", sci17(finite(z.re)?), sci17(finite(z.im)?));
        }
        out.push(']');
    }
    out.push(']');
    Ok(raw(out))
}

/// Parses the output of [`json_complex_matrix`].
pub fn complex_matrix_from_json(rows: &[Vec<[f64; 2]>]) -> Result<DMatrix<Complex>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Format("complex matrix must be square".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| Complex::new(rows[i][j][0], rows[i][j][1])))
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

#[derive(Serialize)]
struct FMatrixOut<'a> {
    #[serde(rename = "N")]
    n: usize,
    f00: Box<RawValue>,
    sum_cfg: Option<&'a SumConfig>,
    entries: Box<RawValue>,
}

#[derive(Deserialize)]
struct FMatrixIn {
    #[serde(rename = "N")]
    n: usize,
    sum_cfg: Option<SumConfig>,
    entries: Vec<Vec<[f64; 2]>>,
}

/// `{N, f00, sum_cfg, entries}` with entries as row-major `[re, im]` pairs.
pub fn fmatrix_json(f: &FMatrix) -> Result<String> {
    let out = FMatrixOut {
        n: f.order(),
        f00: json_number(f.f00())?,
        sum_cfg: f.sum_cfg(),
        entries: json_complex_matrix(f.entries())?,
    };
    serde_json::to_string_pretty(&out).map_err(|e| Error::Format(e.to_string()))
}

/// Reads the layout written by [`fmatrix_json`].
pub fn fmatrix_from_json(text: &str) -> Result<FMatrix> {
    let parsed: FMatrixIn = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let entries = complex_matrix_from_json(&parsed.entries)?;
    if entries.nrows() != parsed.n + 1 {
        return Err(Error::Format(format!(
            "N = {} but entries have {} rows",
            parsed.n,
            entries.nrows()
        )));
    }
    FMatrix::from_entries(entries, parsed.sum_cfg)
}

pub fn fmatrix_csv(f: &FMatrix) -> Result<String> {
    complex_csv("fmatrix", f.order(), 0, f.entries())
}

/// `{N, blocks: {"11": [...], ...}}` with row-major real blocks.
pub fn neumann_json(family: &NeumannFamily) -> Result<String> {
    let mut blocks = BTreeMap::new();
    for ((r, s), b) in family.iter() {
        blocks.insert(format!("{r}{s}"), json_real_matrix(b)?);
    }
    #[derive(Serialize)]
    struct Out {
        #[serde(rename = "N")]
        n: usize,
        blocks: BTreeMap<String, Box<RawValue>>,
    }
    let out = Out {
        n: family.order(),
        blocks,
    };
    serde_json::to_string_pretty(&out).map_err(|e| Error::Format(e.to_string()))
}

/// One CSV document per block, keyed `"11"` to `"33"`.
pub fn neumann_csv(family: &NeumannFamily) -> Result<Vec<(String, String)>> {
    family
        .iter()
        .map(|((r, s), b)| Ok((format!("{r}{s}"), real_csv(&format!("neumann{r}{s}"), family.order(), 0, b)?)))
        .collect()
}
