//! Validated run configuration shared by the commands.

use anyhow::{bail, Context as _};
use serde::Serialize;

use vertexkit::cache::ModeCache;
use vertexkit::extrapolate::SumConfig;
use vertexkit::fmatrix::FBuilder;
use vertexkit::modes::{generate_modes, ExponentPair, ModeTable};
use vertexkit::Error;

use crate::report::Tolerances;
use crate::Common;

/// Echo of the effective settings, written into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub sum_cfg: SumConfig,
    pub window: usize,
}

pub struct Ctx {
    pub run: RunConfig,
    pub tol: Tolerances,
    cache: Option<ModeCache>,
}

impl Ctx {
    /// Checks `window ≤ N/4` and `sum_order ≥ N` for the order `n`.
    pub fn new(common: &Common, n: usize) -> anyhow::Result<Ctx> {
        let tol = Tolerances::parse(&common.tolerance)?;
        let sum_cfg = SumConfig::new(common.sum_order, common.extrapolation, tol.get("sum"))?;
        if n < 2 {
            bail!("--N must be at least 2");
        }
        if common.window == 0 || common.window > n / 4 {
            bail!("--window {} must lie in 1..={} (N/4)", common.window, n / 4);
        }
        if common.sum_order < n {
            bail!("--sum-order {} must be at least N = {n}", common.sum_order);
        }
        Ok(Ctx {
            run: RunConfig {
                n,
                sum_cfg,
                window: common.window,
            },
            tol,
            cache: common.cache_dir.as_ref().map(ModeCache::new),
        })
    }

    /// Settings for commands that take no truncation order.
    pub fn without_order(common: &Common) -> anyhow::Result<Ctx> {
        let tol = Tolerances::parse(&common.tolerance)?;
        Ok(Ctx {
            run: RunConfig {
                n: 0,
                sum_cfg: SumConfig::new(common.sum_order, common.extrapolation, tol.get("sum"))?,
                window: common.window,
            },
            tol,
            cache: common.cache_dir.as_ref().map(ModeCache::new),
        })
    }

    pub fn table(&self, exponents: ExponentPair, length: usize) -> anyhow::Result<ModeTable> {
        match &self.cache {
            Some(c) => c
                .get_or_generate(exponents, length)
                .with_context(|| format!("mode cache {}", c.dir().display())),
            None => Ok(generate_modes(exponents, length)),
        }
    }

    /// Tables of exponent `1/p` and `1 - 1/p` reaching index `length`.
    pub fn pair(&self, p: u32, length: usize) -> anyhow::Result<(ModeTable, ModeTable)> {
        Ok((
            self.table(ExponentPair::lower(p)?, length)?,
            self.table(ExponentPair::upper(p)?, length)?,
        ))
    }

    pub fn fbuilder(&self, n: usize) -> anyhow::Result<FBuilder> {
        let (a, b) = self.pair(3, FBuilder::modes_needed(n, &self.run.sum_cfg))?;
        Ok(FBuilder::new(a, b, self.run.sum_cfg)?)
    }
}

/// Library errors that mean a numeric tolerance was exceeded.
pub fn is_violation(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(
            c.downcast_ref::<Error>(),
            Some(Error::NonConvergence { .. } | Error::Invariant { .. } | Error::ImaginaryResidue { .. })
        )
    })
}
