//! Three-string Neumann blocks, the momentum representation and the ghost
//! midpoint insertion.
//!
//! ```text
//! 𝓕^{rs} = (1/3) [ (C + F + F̄) δ_rs + (C - (F + F̄)/2)(1 - δ_rs) + i(√3/2)(F - F̄) ε_rs ]
//! ```
//!
//! with `ε_rs = +1` when `s - r ≡ 1 (mod 3)`, `-1` when `s - r ≡ 2`, and 0 on
//! the diagonal.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::basis::identity_deviation;
use crate::error::{Error, Result};
use crate::fmatrix::{CMatrix, FMatrix};
use crate::Complex;

/// Imaginary parts of Neumann blocks above this are an error.
pub const REALITY_TOLERANCE: f64 = 1e-12;

fn check_string(r: usize) -> Result<()> {
    if (1..=3).contains(&r) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("string index must be 1, 2 or 3, got {r}")))
    }
}

fn epsilon(r: usize, s: usize) -> f64 {
    match (s + 3 - r) % 3 {
        1 => 1.0,
        2 => -1.0,
        _ => 0.0,
    }
}

/// Complex form of block `(r, s)` built from any `F`-like matrix.
fn block_complex(r: usize, s: usize, f: &DMatrix<Complex>, c: &CMatrix) -> DMatrix<Complex> {
    let cm = c.to_complex();
    let fb = f.map(|z| z.conj());
    let third = Complex::new(1.0 / 3.0, 0.0);
    if r == s {
        (&cm + f + &fb) * third
    } else {
        let sym = &cm - (f + &fb) * Complex::new(0.5, 0.0);
        let anti = (f - &fb) * Complex::new(0.0, 3f64.sqrt() / 2.0 * epsilon(r, s));
        (sym + anti) * third
    }
}

fn real_block(r: usize, s: usize, f: &DMatrix<Complex>, c: &CMatrix) -> Result<DMatrix<f64>> {
    let z = block_complex(r, s, f, c);
    let residue = z.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if residue > REALITY_TOLERANCE {
        return Err(Error::ImaginaryResidue {
            r,
            s,
            residue,
            tolerance: REALITY_TOLERANCE,
        });
    }
    Ok(z.map(|v| v.re))
}

fn check_orders(f: usize, c: &CMatrix) -> Result<()> {
    if c.order() != f {
        return Err(Error::InvalidArgument(format!(
            "C of order {} does not match F of order {f}",
            c.order()
        )));
    }
    Ok(())
}

/// Block `𝓕^{rs}` for strings `r, s ∈ {1, 2, 3}`.
pub fn neumann_block(r: usize, s: usize, f: &FMatrix, c: &CMatrix) -> Result<DMatrix<f64>> {
    check_string(r)?;
    check_string(s)?;
    check_orders(f.order(), c)?;
    real_block(r, s, f.entries(), c)
}

/// All nine blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannFamily {
    n: usize,
    blocks: Vec<DMatrix<f64>>,
}

/// Defects of the algebraic properties of a [`NeumannFamily`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    /// `max |Σ_s 𝓕^{rs} - C|` over `r`
    pub row_sum: f64,
    /// `max |𝓕^{rs} - 𝓕^{r+1,s+1}|`
    pub cyclicity: f64,
    /// `max |𝓕^{rs}_{nm} - 𝓕^{sr}_{mn}|`
    pub exchange: f64,
}

impl FamilyReport {
    pub fn max(&self) -> f64 {
        self.row_sum.max(self.cyclicity).max(self.exchange)
    }
}

impl NeumannFamily {
    pub fn build(f: &FMatrix, c: &CMatrix) -> Result<NeumannFamily> {
        check_orders(f.order(), c)?;
        Self::from_complex(f.entries(), c)
    }

    fn from_complex(f: &DMatrix<Complex>, c: &CMatrix) -> Result<NeumannFamily> {
        let mut blocks = Vec::with_capacity(9);
        for r in 1..=3 {
            for s in 1..=3 {
                blocks.push(real_block(r, s, f, c)?);
            }
        }
        Ok(NeumannFamily {
            n: c.order(),
            blocks,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Block `(r, s)`, 1-based. Panics outside `1..=3`.
    pub fn block(&self, r: usize, s: usize) -> &DMatrix<f64> {
        assert!((1..=3).contains(&r) && (1..=3).contains(&s), "string index out of range");
        &self.blocks[3 * (r - 1) + (s - 1)]
    }

    /// Blocks in the order `11, 12, 13, 21, ..., 33` with their keys.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &DMatrix<f64>)> {
        self.blocks.iter().enumerate().map(|(i, b)| ((i / 3 + 1, i % 3 + 1), b))
    }

    pub fn report(&self, c: &CMatrix) -> FamilyReport {
        let cm = c.to_real();
        let next = |r: usize| r % 3 + 1;
        let mut row_sum = 0.0f64;
        let mut cyclicity = 0.0f64;
        let mut exchange = 0.0f64;
        for r in 1..=3 {
            let sum = self.block(r, 1) + self.block(r, 2) + self.block(r, 3);
            row_sum = row_sum.max((sum - &cm).amax());
            for s in 1..=3 {
                cyclicity = cyclicity.max((self.block(r, s) - self.block(next(r), next(s))).amax());
                exchange = exchange.max((self.block(r, s) - self.block(s, r).transpose()).amax());
            }
        }
        FamilyReport {
            row_sum,
            cyclicity,
            exchange,
        }
    }
}

/// `F` rewritten on momentum eigenstates of the zero mode.
///
/// ```text
/// F'_00 = (1 + F00)/(1 - F00)
/// F'_0n = F_0n/(1 - F00),  F'_n0 = F_n0/(1 - F00)
/// F'_nm = F_nm + F_n0 F_0m/(1 - F00)
/// ```
#[derive(Debug, Clone)]
pub struct MomentumRep {
    n: usize,
    primed: DMatrix<Complex>,
}

impl MomentumRep {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn f00_prime(&self) -> f64 {
        self.primed[(0, 0)].re
    }

    /// `F'_0n` for `n = 1..=N` (index 0 of the vector is `n = 1`).
    pub fn f0n_prime(&self) -> DVector<Complex> {
        self.primed.row(0).columns(1, self.n).transpose().into_owned()
    }

    /// `F'_nm` for `n, m ≥ 1`.
    pub fn fnm_prime(&self) -> DMatrix<Complex> {
        self.primed.view((1, 1), (self.n, self.n)).into_owned()
    }

    /// The full primed matrix including the zero row and column.
    pub fn primed(&self) -> &DMatrix<Complex> {
        &self.primed
    }

    /// `max |(F'F' - I)_nm|` over `1 ≤ n, m ≤ window`, summing `k ≥ 1`.
    pub fn involution_residual(&self, window: usize) -> f64 {
        let b = self.fnm_prime();
        identity_deviation(&(&b * &b), window)
    }

    /// Primed Neumann blocks, with `C` unchanged.
    pub fn primed_family(&self) -> Result<NeumannFamily> {
        NeumannFamily::from_complex(&self.primed, &CMatrix::new(self.n))
    }
}

pub fn momentum_rep(f: &FMatrix) -> Result<MomentumRep> {
    let f00 = f.get(0, 0);
    let d = Complex::new(1.0, 0.0) - f00;
    if d.norm() == 0.0 {
        return Err(Error::SingularTransform);
    }
    let n = f.order();
    let e = f.entries();
    let primed = DMatrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
        (0, 0) => (Complex::new(1.0, 0.0) + f00) / d,
        (0, _) | (_, 0) => e[(i, j)] / d,
        _ => e[(i, j)] + e[(i, 0)] * e[(0, j)] / d,
    });
    Ok(MomentumRep { n, primed })
}

/// `G^{rs}_{nm} = -𝓕'^{rs}_{nm} / (√(n + δ_n0) √(m + δ_m0))`.
pub fn g_matrix(r: usize, s: usize, momentum: &MomentumRep, c: &CMatrix) -> Result<DMatrix<f64>> {
    check_string(r)?;
    check_string(s)?;
    check_orders(momentum.order(), c)?;
    let block = real_block(r, s, momentum.primed(), c)?;
    let w = |n: usize| 1.0 / (n.max(1) as f64).sqrt();
    Ok(DMatrix::from_fn(block.nrows(), block.ncols(), |i, j| -block[(i, j)] * w(i) * w(j)))
}

/// Coefficients of the ghost midpoint insertion on the third string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhostInsertion {
    pub n: usize,
    pub coeffs: Vec<f64>,
}

/// `3 (-1)^{n/2} / √n` on even `n ≥ 2`, zero elsewhere.
pub fn ghost_insertion(n: usize) -> Result<GhostInsertion> {
    if n < 2 {
        return Err(Error::InvalidArgument("ghost insertion needs N >= 2".into()));
    }
    let coeffs = (0..=n)
        .map(|k| {
            if k >= 2 && k % 2 == 0 {
                let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                3.0 * sign / (k as f64).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    Ok(GhostInsertion { n, coeffs })
}
