//! Infinite sums over Taylor modes.
//!
//! With `u_m` the modes of exponent `s = q/p`:
//!
//! ```text
//! O_{±n}  = Σ_{m odd}          u_m / (±n + m)        n even
//! S_n     = Σ_{m ≥ 0, n+m even} u_m / (n + m)
//! S̃_{±n}  = Σ_{m odd}          u_m / (±n + m)²       n even
//! Ẽ_{±n}  = Σ_{m even ≥ 0}     u_m / (±n + m)²       n odd
//! ```
//!
//! All of them are truncated after `cfg.sum_order` summands and extrapolated
//! over the exponent ladder [`Ladder::for_modes`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrapolate::{extrapolated_sum, Ladder, SumConfig, SumValue, MAX_LEVELS};
use crate::modes::ModeTable;

/// Sign in front of the subscript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn apply(self, n: usize) -> i64 {
        match self {
            Sign::Plus => n as i64,
            Sign::Minus => -(n as i64),
        }
    }
}

/// `Σ_{m ≡ parity (mod 2)} u_m / (shift + m)^power`.
///
/// Summand `j` is `m = parity + 2j`, so the table must reach
/// `parity + 2 (sum_order - 1)`.
pub fn parity_sum(
    modes: &ModeTable,
    shift: i64,
    parity: usize,
    power: u32,
    cfg: &SumConfig,
) -> Result<SumValue> {
    cfg.validate()?;
    let last = parity + 2 * (cfg.sum_order - 1);
    modes.require(last)?;
    if shift <= 0 && (-shift) as usize % 2 == parity && (-shift) as usize <= last {
        return Err(Error::InvalidArgument(format!(
            "summand m = {} has a zero denominator",
            -shift
        )));
    }
    let u = modes.coeffs();
    let ladder = Ladder::for_modes(modes.exponents().exponent(), power, MAX_LEVELS as usize);
    let term = |j: usize| {
        let m = parity + 2 * j;
        let d = (shift + m as i64) as f64;
        u[m] / d.powi(power as i32)
    };
    Ok(extrapolated_sum(term, cfg, &ladder))
}

/// Highest mode index touched by the sums at this configuration.
pub fn modes_needed(cfg: &SumConfig) -> usize {
    2 * cfg.sum_order
}

/// `O_{±n}` for even `n ≥ 2`.
pub fn sum_o(sign: Sign, n: usize, modes: &ModeTable, cfg: &SumConfig) -> Result<SumValue> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("O needs an even index >= 2, got {n}")));
    }
    parity_sum(modes, sign.apply(n), 1, 1, cfg)
}

/// Exact value of `O_n`: `π / (2 sin(qπ/p)) · u_n`.
pub fn o_closed_form(n: usize, modes: &ModeTable) -> Result<f64> {
    modes.require(n)?;
    let s = modes.exponents().exponent();
    Ok(PI / (2.0 * (s * PI).sin()) * modes[n])
}

/// `S_n` for `n ≥ 1`.
pub fn sum_s(n: usize, modes: &ModeTable, cfg: &SumConfig) -> Result<SumValue> {
    if n == 0 {
        return Err(Error::InvalidArgument("S needs an index >= 1".into()));
    }
    parity_sum(modes, n as i64, n % 2, 1, cfg)
}

/// `S̃_{±n}` for even `n ≥ 2`.
pub fn sum_stilde(sign: Sign, n: usize, modes: &ModeTable, cfg: &SumConfig) -> Result<SumValue> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("S~ needs an even index >= 2, got {n}")));
    }
    parity_sum(modes, sign.apply(n), 1, 2, cfg)
}

/// `Ẽ_{±n}` for odd `n ≥ 1`.
pub fn sum_etilde(sign: Sign, n: usize, modes: &ModeTable, cfg: &SumConfig) -> Result<SumValue> {
    if n % 2 != 1 {
        return Err(Error::InvalidArgument(format!("E~ needs an odd index, got {n}")));
    }
    parity_sum(modes, sign.apply(n), 0, 2, cfg)
}

fn check_pair(modes_a: &ModeTable, modes_b: &ModeTable) -> Result<()> {
    let (ea, eb) = (modes_a.exponents(), modes_b.exponents());
    if ea.q() != 1 || eb != ea.conjugate() {
        return Err(Error::InvalidArgument(format!(
            "expected tables for exponents 1/p and 1-1/p, got {}/{} and {}/{}",
            ea.q(),
            ea.p(),
            eb.q(),
            eb.p()
        )));
    }
    Ok(())
}

/// `u_{2n}^{1/p} S_{2n}^{(p-1,p)} + u_{2n}^{1-1/p} S_{2n}^{(1,p)}`, which equals `1/n`.
pub fn identity_us(n: usize, modes_a: &ModeTable, modes_b: &ModeTable, cfg: &SumConfig) -> Result<SumValue> {
    check_pair(modes_a, modes_b)?;
    if n == 0 {
        return Err(Error::InvalidArgument("identity_us needs n >= 1".into()));
    }
    let k = 2 * n;
    modes_a.require(k)?;
    modes_b.require(k)?;
    let sa = sum_s(k, modes_a, cfg)?;
    let sb = sum_s(k, modes_b, cfg)?;
    Ok(SumValue {
        value: modes_a[k] * sb.value + modes_b[k] * sa.value,
        est_error: modes_a[k] * sb.est_error + modes_b[k] * sa.est_error,
        terms_used: sa.terms_used + sb.terms_used,
    })
}

/// `W_{mn} = (u_m^{1/p} u_n^{1-1/p} + u_m^{1-1/p} u_n^{1/p}) / (m + n)`.
pub fn w_element(m: usize, n: usize, modes_a: &ModeTable, modes_b: &ModeTable) -> Result<f64> {
    check_pair(modes_a, modes_b)?;
    if m + n == 0 {
        return Err(Error::InvalidArgument("W_00 has a zero denominator".into()));
    }
    let top = m.max(n);
    modes_a.require(top)?;
    modes_b.require(top)?;
    Ok((modes_a[m] * modes_b[n] + modes_b[m] * modes_a[n]) / (m + n) as f64)
}

/// `(n+1) W_{n+1,m} - (n-1) W_{n-1,m} + (m+1) W_{n,m+1} - (m-1) W_{n,m-1}`,
/// which vanishes for `m + n` odd. Needs `n, m ≥ 1`.
pub fn w_recursion_residual(n: usize, m: usize, modes_a: &ModeTable, modes_b: &ModeTable) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("W recursion needs n, m >= 1".into()));
    }
    let w = |i: usize, j: usize| w_element(i, j, modes_a, modes_b);
    let (nf, mf) = (n as f64, m as f64);
    Ok((nf + 1.0) * w(n + 1, m)? - (nf - 1.0) * w(n - 1, m)? + (mf + 1.0) * w(n, m + 1)?
        - (mf - 1.0) * w(n, m - 1)?)
}

/// `Σ_{n ≥ 1} a_{2n} / (2n)`, whose limit is `½ ln(27/16)` at `p = 3`.
pub fn log_series(modes_a: &ModeTable, cfg: &SumConfig) -> Result<SumValue> {
    // shift 0, even parity; the m = 0 summand is dropped by starting at j = 1
    cfg.validate()?;
    modes_a.require(2 * cfg.sum_order)?;
    let u = modes_a.coeffs();
    let ladder = Ladder::for_modes(modes_a.exponents().exponent(), 1, MAX_LEVELS as usize);
    let term = |j: usize| {
        let m = 2 * (j + 1);
        u[m] / m as f64
    };
    Ok(extrapolated_sum(term, cfg, &ladder))
}
