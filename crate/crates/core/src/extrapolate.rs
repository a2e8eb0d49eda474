//! Partial sums with tail extrapolation over a known ladder of exponents.
//!
//! A partial sum `S(M)` of a series whose terms have an asymptotic expansion
//! in powers of the index behaves like
//!
//! ```text
//! S(M) = S + c_1 M^{e_1} + c_2 M^{e_2} + ...,   0 > e_1 > e_2 > ...
//! ```
//!
//! Given the exponents, each Richardson level removes one of them using sums
//! at `M` and `2M`:
//!
//! ```text
//! R'(2M) = (R(2M) - 2^e R(M)) / (1 - 2^e)
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modes::NeumaierSum;

/// Most refinement levels accepted; deeper tables only amplify roundoff.
pub const MAX_LEVELS: u32 = 8;

/// Smallest accepted `sum_order`.
pub const MIN_SUM_ORDER: usize = 16;

/// Tail treatment applied to a partial sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extrapolation {
    /// Raw partial sum; the error estimate still models the leading tail.
    None,
    /// `levels` rounds of Richardson elimination.
    Richardson { levels: u32 },
}

impl Extrapolation {
    pub fn levels(&self) -> u32 {
        match self {
            Extrapolation::None => 0,
            Extrapolation::Richardson { levels } => *levels,
        }
    }
}

impl fmt::Display for Extrapolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extrapolation::None => f.write_str("none"),
            Extrapolation::Richardson { levels } => write!(f, "richardson{levels}"),
        }
    }
}

impl FromStr for Extrapolation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            return Ok(Extrapolation::None);
        }
        let levels = s
            .strip_prefix("richardson")
            .and_then(|k| k.parse::<u32>().ok())
            .filter(|k| (1..=MAX_LEVELS).contains(k))
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown extrapolation '{s}' (expected none or richardson1..richardson{MAX_LEVELS})"
                ))
            })?;
        Ok(Extrapolation::Richardson { levels })
    }
}

impl Serialize for Extrapolation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Extrapolation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Truncation and tolerance settings for every infinite sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumConfig {
    /// Summands in the finest partial sum.
    pub sum_order: usize,
    pub extrapolation: Extrapolation,
    pub tolerance: f64,
}

impl SumConfig {
    pub fn new(sum_order: usize, extrapolation: Extrapolation, tolerance: f64) -> Result<Self> {
        let cfg = SumConfig {
            sum_order,
            extrapolation,
            tolerance,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sum_order < MIN_SUM_ORDER {
            return Err(Error::InvalidArgument(format!(
                "sum_order {} is below the minimum {MIN_SUM_ORDER}",
                self.sum_order
            )));
        }
        let levels = self.extrapolation.levels();
        if levels > MAX_LEVELS {
            return Err(Error::InvalidArgument(format!(
                "{levels} extrapolation levels exceed the maximum {MAX_LEVELS}"
            )));
        }
        // None still needs the half-length sum for its error estimate.
        let step = 1usize << levels.max(1);
        if !self.sum_order.is_multiple_of(step) {
            return Err(Error::InvalidArgument(format!(
                "sum_order {} must be divisible by {step} for {}",
                self.sum_order, self.extrapolation
            )));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    /// Same settings with `sum_order` doubled.
    pub fn refined(&self) -> SumConfig {
        SumConfig {
            sum_order: self.sum_order * 2,
            ..*self
        }
    }
}

impl Default for SumConfig {
    fn default() -> Self {
        SumConfig {
            sum_order: 2048,
            extrapolation: Extrapolation::Richardson { levels: 2 },
            tolerance: 1e-6,
        }
    }
}

/// Result of an extrapolated sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumValue {
    pub value: f64,
    pub est_error: f64,
    pub terms_used: usize,
}

impl SumValue {
    /// The value, or a non-convergence error when `est_error > tolerance`.
    pub fn within(&self, what: impl Into<String>, tolerance: f64) -> Result<f64> {
        if self.est_error <= tolerance {
            Ok(self.value)
        } else {
            Err(Error::NonConvergence {
                what: what.into(),
                est_error: self.est_error,
                tolerance,
            })
        }
    }
}

/// Descending exponents of the tail `S(M) - S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder(Vec<f64>);

impl Ladder {
    /// Exponents for `sum u_m / (c + m)^r` when `u_m` are the Taylor modes
    /// of exponent `s`: the two endpoint singularities give terms decaying
    /// like `m^(s-1-r)` and `m^(-s-1-r)`, each followed by integer steps.
    pub fn for_modes(s: f64, r: u32, depth: usize) -> Ladder {
        let r = f64::from(r);
        let mut e = Vec::with_capacity(2 * depth);
        for k in 0..depth {
            e.push(s - r - k as f64);
            e.push(-s - r - k as f64);
        }
        Ladder::from_unsorted(e)
    }

    /// All negative non-integer multiples of `1/p`.
    pub fn fractional(p: u32, depth: usize) -> Ladder {
        let e = (1..)
            .filter(|j| j % p != 0)
            .take(depth)
            .map(|j| -f64::from(j) / f64::from(p))
            .collect();
        Ladder(e)
    }

    /// An explicit ladder; sorted descending and deduplicated.
    pub fn new(exponents: Vec<f64>) -> Ladder {
        Ladder::from_unsorted(exponents)
    }

    fn from_unsorted(mut e: Vec<f64>) -> Ladder {
        e.sort_by(|a, b| b.total_cmp(a));
        e.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        Ladder(e)
    }

    pub fn exponents(&self) -> &[f64] {
        &self.0
    }
}

/// Sums `term(0) + term(1) + ...` truncated and extrapolated per `cfg`.
///
/// `ladder` must hold at least `max(levels, 1)` exponents.
pub fn extrapolated_sum(term: impl Fn(usize) -> f64, cfg: &SumConfig, ladder: &Ladder) -> SumValue {
    let levels = cfg.extrapolation.levels() as usize;
    let finest = cfg.sum_order;
    let exps = ladder.exponents();
    assert!(exps.len() >= levels.max(1), "exponent ladder too short");

    let n_cuts = levels.max(1) + 1;
    let cuts: Vec<usize> = (0..n_cuts).map(|j| finest >> (n_cuts - 1 - j)).collect();
    let mut partial = Vec::with_capacity(n_cuts);
    let mut acc = NeumaierSum::default();
    let mut abs_sum = 0.0;
    let mut next_cut = 0;
    for i in 0..finest {
        let t = term(i);
        acc.add(t);
        abs_sum += t.abs();
        while next_cut < n_cuts && cuts[next_cut] == i + 1 {
            partial.push(acc.value());
            next_cut += 1;
        }
    }

    if levels == 0 {
        let f = 2f64.powf(exps[0]);
        let diff = partial[1] - partial[0];
        let est = (diff * f / (1.0 - f)).abs() + f64::EPSILON * abs_sum;
        return SumValue {
            value: partial[1],
            est_error: est,
            terms_used: finest,
        };
    }

    let mut row = partial;
    let mut prev_last = *row.last().unwrap();
    let mut amplification = 1.0;
    for &e in &exps[..levels] {
        let f = 2f64.powf(e);
        amplification *= (1.0 + f) / (1.0 - f);
        prev_last = *row.last().unwrap();
        row = row.windows(2).map(|w| (w[1] - f * w[0]) / (1.0 - f)).collect();
    }
    let value = row[0];
    let roundoff = f64::EPSILON * abs_sum * amplification;
    SumValue {
        value,
        est_error: (value - prev_last).abs() + roundoff,
        terms_used: finest,
    }
}
