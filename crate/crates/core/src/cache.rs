//! On-disk cache of mode tables keyed by `(p, q, L)`.
//!
//! Each table is a JSON file `{p, q, length, coeffs}` with 17 significant
//! digits per coefficient. Writes go through a temporary file and a rename,
//! so concurrent readers see either the old file or the complete new one.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::export::{json_vector, write_atomic};
use crate::modes::{generate_modes, ExponentPair, ModeTable};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "VERTEXKIT_CACHE";

#[derive(Serialize)]
struct CacheFileOut {
    p: u32,
    q: u32,
    length: usize,
    coeffs: Box<RawValue>,
}

#[derive(Deserialize)]
struct CacheFileIn {
    p: u32,
    q: u32,
    length: usize,
    coeffs: Vec<f64>,
}

/// One file in the cache directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CacheEntry {
    pub p: u32,
    pub q: u32,
    pub length: usize,
    pub path: PathBuf,
}

/// A directory of cached mode tables.
#[derive(Debug, Clone)]
pub struct ModeCache {
    dir: PathBuf,
}

impl ModeCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ModeCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn file_name(p: u32, q: u32, length: usize) -> String {
        format!("modes_p{p}_q{q}_L{length}.json")
    }

    fn parse_name(name: &str) -> Option<(u32, u32, usize)> {
        let rest = name.strip_prefix("modes_p")?.strip_suffix(".json")?;
        let (p, rest) = rest.split_once("_q")?;
        let (q, l) = rest.split_once("_L")?;
        Some((p.parse().ok()?, q.parse().ok()?, l.parse().ok()?))
    }

    pub fn path_for(&self, exponents: ExponentPair, length: usize) -> PathBuf {
        self.dir
            .join(Self::file_name(exponents.p(), exponents.q(), length))
    }

    /// Writes `table` atomically and returns its path.
    pub fn store(&self, table: &ModeTable) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let e = table.exponents();
        let file = CacheFileOut {
            p: e.p(),
            q: e.q(),
            length: table.order(),
            coeffs: json_vector(table.coeffs())?,
        };
        let path = self.path_for(e, table.order());
        let text = serde_json::to_string(&file).map_err(|source| Error::Json {
            path: path.clone(),
            source,
        })?;
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    /// Reads a table stored under exactly `(exponents, length)`.
    pub fn load(&self, exponents: ExponentPair, length: usize) -> Result<Option<ModeTable>> {
        let path = self.path_for(exponents, length);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(&path, e)),
        };
        let file: CacheFileIn = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.clone(),
            source,
        })?;
        let stored = ExponentPair::new(file.p, file.q)?;
        if stored != exponents || file.length != length || file.coeffs.len() != length + 1 || file.coeffs[0] != 1.0 {
            return Err(Error::Format(format!(
                "{}: contents do not match the file name",
                path.display()
            )));
        }
        Ok(Some(ModeTable::from_parts(exponents, file.coeffs)))
    }

    /// A table of at least `length`, read from the cache when any cached
    /// table is long enough, otherwise generated and stored.
    pub fn get_or_generate(&self, exponents: ExponentPair, length: usize) -> Result<ModeTable> {
        let longer = self
            .list()?
            .into_iter()
            .filter(|e| e.p == exponents.p() && e.q == exponents.q() && e.length >= length)
            .min_by_key(|e| e.length);
        if let Some(entry) = longer {
            if let Some(t) = self.load(exponents, entry.length)? {
                return t.truncated(length);
            }
        }
        let t = generate_modes(exponents, length);
        self.store(&t)?;
        Ok(t)
    }

    /// Cached tables sorted by `(p, q, length)`. A missing directory is empty.
    pub fn list(&self) -> Result<Vec<CacheEntry>> {
        let rd = match fs::read_dir(&self.dir) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(Error::io(&self.dir, e)),
        };
        let mut out = Vec::new();
        for entry in rd {
            let entry = entry.map_err(|e| Error::io(&self.dir, e))?;
            let name = entry.file_name();
            if let Some((p, q, length)) = name.to_str().and_then(Self::parse_name) {
                out.push(CacheEntry {
                    p,
                    q,
                    length,
                    path: entry.path(),
                });
            }
        }
        out.sort_by_key(|a| (a.p, a.q, a.length));
        Ok(out)
    }

    /// Removes every cached table; returns how many were removed.
    pub fn clear(&self) -> Result<usize> {
        let entries = self.list()?;
        for e in &entries {
            fs::remove_file(&e.path).map_err(|err| Error::io(&e.path, err))?;
        }
        Ok(entries.len())
    }

    /// Generates and stores both tables `q = 1` and `q = p - 1` of length `length`.
    pub fn prewarm(&self, p: u32, length: usize) -> Result<Vec<PathBuf>> {
        let lower = ExponentPair::lower(p)?;
        let mut pairs = vec![lower];
        if lower.conjugate() != lower {
            pairs.push(lower.conjugate());
        }
        pairs
            .into_iter()
            .map(|e| self.store(&generate_modes(e, length)))
            .collect()
    }
}
