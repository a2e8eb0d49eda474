//! Artifact commands: modes, matrices, inverse, fmatrix, vertex, cache.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _};
use clap::ValueEnum;
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::value::RawValue;

use vertexkit::basis::{build_coupling, BasisKind, BasisMap};
use vertexkit::cache::ModeCache;
use vertexkit::export::{
    fmatrix_csv, fmatrix_json, json_real_matrix, json_vector, neumann_csv, neumann_json, real_csv,
};
use vertexkit::fmatrix::{f_assemble_with, CMatrix};
use vertexkit::inverse::{
    ansatz_inverse, inverse_residuals, params_for_strings, solve_params, special_inverse, InverseRoute,
};
use vertexkit::modes::ExponentPair;
use vertexkit::vertex::{g_matrix, ghost_insertion, momentum_rep, NeumannFamily};

use crate::context::Ctx;
use crate::report::{emit, to_json, SCHEMA_VERSION};
use crate::{Common, Format, Outcome};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    M1,
    M2,
    CoordFullToHalf,
    CoordHalfToFull,
    MomFullToHalf,
    MomHalfToFull,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexPart {
    Neumann,
    G,
    Ghost,
}

#[derive(Serialize)]
struct MatrixOut<'a> {
    schema_version: u32,
    kind: &'a str,
    #[serde(rename = "N")]
    n: usize,
    index_base: usize,
    entries: Box<RawValue>,
}

fn matrix_artifact(c: &Common, kind: &str, n: usize, index_base: usize, m: &DMatrix<f64>) -> anyhow::Result<()> {
    let text = match c.format {
        Format::Csv => real_csv(kind, n, index_base, m)?,
        Format::Json => to_json(&MatrixOut {
            schema_version: SCHEMA_VERSION,
            kind,
            n,
            index_base,
            entries: json_real_matrix(m)?,
        })?,
    };
    emit(c.out.as_deref(), &text)
}

pub fn modes(c: &Common, p: u32, q: u32, length: usize) -> anyhow::Result<Outcome> {
    let e = ExponentPair::new(p, q)?;
    let t = Ctx::without_order(c)?.table(e, length)?;
    let text = match c.format {
        Format::Csv => real_csv("modes", length, 0, &DMatrix::from_column_slice(length + 1, 1, t.coeffs()))?,
        Format::Json => {
            #[derive(Serialize)]
            struct Out {
                schema_version: u32,
                p: u32,
                q: u32,
                length: usize,
                coeffs: Box<RawValue>,
            }
            to_json(&Out {
                schema_version: SCHEMA_VERSION,
                p,
                q,
                length,
                coeffs: json_vector(t.coeffs())?,
            })?
        }
    };
    emit(c.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}

pub fn matrices(c: &Common, which: MatrixKind) -> anyhow::Result<Outcome> {
    let n = c.order()?;
    let coupling = build_coupling(n)?;
    let basis = |k: BasisKind| BasisMap::from_coupling(k, &coupling);
    match which {
        MatrixKind::M1 => matrix_artifact(c, "m1", n, 1, coupling.m1())?,
        MatrixKind::M2 => matrix_artifact(c, "m2", n, 1, coupling.m2())?,
        MatrixKind::CoordFullToHalf
        | MatrixKind::CoordHalfToFull
        | MatrixKind::MomFullToHalf
        | MatrixKind::MomHalfToFull => {
            let kind = match which {
                MatrixKind::CoordFullToHalf => BasisKind::CoordFullToHalf,
                MatrixKind::CoordHalfToFull => BasisKind::CoordHalfToFull,
                MatrixKind::MomFullToHalf => BasisKind::MomFullToHalf,
                _ => BasisKind::MomHalfToFull,
            };
            let map = basis(kind);
            matrix_artifact(c, kind.name(), n, 0, map.matrix())?;
        }
    }
    Ok(Outcome::Pass)
}

pub fn inverse(c: &Common, alpha: Option<f64>, beta: f64, strings: Option<(u32, u32)>) -> anyhow::Result<Outcome> {
    let n = c.order()?;
    let ctx = Ctx::new(c, n)?;
    let (route, alpha, beta) = match (strings, alpha) {
        (Some((k, s)), _) => {
            let route = params_for_strings(k, s)?;
            (route, (f64::from(k) * std::f64::consts::PI / f64::from(s)).cos(), 1.0)
        }
        (None, Some(a)) => (solve_params(a, beta)?, a, beta),
        (None, None) => bail!("give --alpha (with optional --beta) or --k with --strings"),
    };
    let coupling = build_coupling(n)?;
    let inv = match &route {
        InverseRoute::Ansatz(params) => {
            let (a, b) = ctx.pair(params.p, 2 * n)?;
            ansatz_inverse(params, &a, &b, n)?
        }
        InverseRoute::Special { which, .. } => special_inverse(*which, &coupling),
    };
    let residuals = inverse_residuals(&inv, alpha, beta, &coupling, c.window)?;
    eprintln!(
        "inverse N={} window={}: left {:.3e}, right {:.3e}",
        n, c.window, residuals.left, residuals.right
    );
    let text = match c.format {
        Format::Csv => real_csv("inverse", n, 1, inv.entries())?,
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                schema_version: u32,
                kind: &'a str,
                #[serde(rename = "N")]
                n: usize,
                index_base: usize,
                route: &'a InverseRoute,
                residuals: vertexkit::inverse::InverseResiduals,
                entries: Box<RawValue>,
            }
            to_json(&Out {
                schema_version: SCHEMA_VERSION,
                kind: "inverse",
                n,
                index_base: 1,
                route: &route,
                residuals,
                entries: json_real_matrix(inv.entries())?,
            })?
        }
    };
    emit(c.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}

pub fn fmatrix(c: &Common) -> anyhow::Result<Outcome> {
    let n = c.order()?;
    let ctx = Ctx::new(c, n)?;
    let f = f_assemble_with(&ctx.fbuilder(n)?, n)?;
    let text = match c.format {
        Format::Csv => fmatrix_csv(&f)?,
        Format::Json => {
            let mut s = fmatrix_json(&f)?;
            s.push('\n');
            s
        }
    };
    emit(c.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}

/// `dir/stem_{key}.csv` for each block.
fn block_paths(out: &Path, key: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("vertex");
    out.with_file_name(format!("{stem}_{key}.csv"))
}

fn emit_blocks(c: &Common, docs: Vec<(String, String)>) -> anyhow::Result<()> {
    let out = c
        .out
        .as_deref()
        .context("CSV output of several blocks needs --out; files are named <stem>_<rs>.csv")?;
    for (key, text) in docs {
        emit(Some(&block_paths(out, &key)), &text)?;
    }
    Ok(())
}

pub fn vertex(c: &Common, part: VertexPart) -> anyhow::Result<Outcome> {
    let n = c.order()?;
    if part == VertexPart::Ghost {
        let g = ghost_insertion(n)?;
        let text = match c.format {
            Format::Csv => real_csv("ghost", n, 0, &DMatrix::from_column_slice(n + 1, 1, &g.coeffs))?,
            Format::Json => {
                #[derive(Serialize)]
                struct Out {
                    schema_version: u32,
                    #[serde(rename = "N")]
                    n: usize,
                    coeffs: Box<RawValue>,
                }
                to_json(&Out {
                    schema_version: SCHEMA_VERSION,
                    n,
                    coeffs: json_vector(&g.coeffs)?,
                })?
            }
        };
        emit(c.out.as_deref(), &text)?;
        return Ok(Outcome::Pass);
    }
    let ctx = Ctx::new(c, n)?;
    let f = f_assemble_with(&ctx.fbuilder(n)?, n)?;
    let cm = CMatrix::new(n);
    match part {
        VertexPart::Neumann => {
            let fam = NeumannFamily::build(&f, &cm)?;
            match c.format {
                Format::Json => emit(c.out.as_deref(), &(neumann_json(&fam)? + "\n"))?,
                Format::Csv => emit_blocks(c, neumann_csv(&fam)?)?,
            }
        }
        VertexPart::G => {
            let m = momentum_rep(&f)?;
            let mut blocks = Vec::with_capacity(9);
            for r in 1..=3 {
                for s in 1..=3 {
                    blocks.push((format!("{r}{s}"), g_matrix(r, s, &m, &cm)?));
                }
            }
            match c.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out {
                        schema_version: u32,
                        #[serde(rename = "N")]
                        n: usize,
                        f00_prime: Box<RawValue>,
                        blocks: std::collections::BTreeMap<String, Box<RawValue>>,
                    }
                    let blocks = blocks
                        .iter()
                        .map(|(k, b)| Ok((k.clone(), json_real_matrix(b)?)))
                        .collect::<anyhow::Result<_>>()?;
                    let text = to_json(&Out {
                        schema_version: SCHEMA_VERSION,
                        n,
                        f00_prime: vertexkit::export::json_number(m.f00_prime())?,
                        blocks,
                    })?;
                    emit(c.out.as_deref(), &text)?;
                }
                Format::Csv => {
                    let docs = blocks
                        .iter()
                        .map(|(k, b)| Ok((k.clone(), real_csv(&format!("g{k}"), n, 0, b)?)))
                        .collect::<anyhow::Result<_>>()?;
                    emit_blocks(c, docs)?;
                }
            }
        }
        VertexPart::Ghost => unreachable!(),
    }
    Ok(Outcome::Pass)
}

fn cache(c: &Common) -> anyhow::Result<ModeCache> {
    c.cache_dir
        .as_ref()
        .map(ModeCache::new)
        .context("no cache directory; pass --cache-dir or set VERTEXKIT_CACHE")
}

pub fn cache_list(c: &Common) -> anyhow::Result<Outcome> {
    let entries = cache(c)?.list()?;
    #[derive(Serialize)]
    struct Row {
        p: u32,
        q: u32,
        length: usize,
        file: String,
    }
    let rows: Vec<Row> = entries
        .iter()
        .map(|e| Row {
            p: e.p,
            q: e.q,
            length: e.length,
            file: e.path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        })
        .collect();
    let text = match c.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut s = String::from("p,q,length,file\n");
            for r in &rows {
                s.push_str(&format!("{},{},{},{}\n", r.p, r.q, r.length, r.file));
            }
            s
        }
    };
    emit(c.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}

pub fn cache_clear(c: &Common) -> anyhow::Result<Outcome> {
    let removed = cache(c)?.clear()?;
    eprintln!("removed {removed} cached tables");
    Ok(Outcome::Pass)
}

pub fn cache_prewarm(c: &Common, p: u32, length: usize) -> anyhow::Result<Outcome> {
    for path in cache(c)?.prewarm(p, length)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(Outcome::Pass)
}
