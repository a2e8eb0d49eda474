//! Taylor modes of the generating functions `((1+x)/(1-x))^(q/p)`.
//!
//! The three-string vertex uses `p = 3`, where `q = 1` and `q = 2` give the
//! tables `a_k` and `b_k`. The coefficients obey the two-term recursion
//!
//! ```text
//! u_0 = 1,  u_1 = 2q/p,  (k+1) u_{k+1} = (2q/p) u_k + (k-1) u_{k-1}
//! ```
//!
//! which is what [`generate_modes`] uses. [`generate_modes_oracle`] computes
//! the same numbers by convolving the binomial series of `(1+x)^(q/p)` and
//! `(1-x)^(-q/p)` and exists to check the recursion.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The exponent `q/p` of a generating function, restricted to the
/// conjugate pair `q ∈ {1, p-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExponentPair {
    p: u32,
    q: u32,
}

impl ExponentPair {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p < 2 || !(q == 1 || q == p - 1) {
            return Err(Error::InvalidExponents { p, q });
        }
        Ok(ExponentPair { p, q })
    }

    /// `q = 1`, the `a_k` family at `p = 3`.
    pub fn lower(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    /// `q = p - 1`, the `b_k` family at `p = 3`.
    pub fn upper(p: u32) -> Result<Self> {
        Self::new(p, p.saturating_sub(1))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// The exponent `q/p` as a float.
    pub fn exponent(&self) -> f64 {
        f64::from(self.q) / f64::from(self.p)
    }

    /// The partner `(p, p-q)`.
    pub fn conjugate(&self) -> Self {
        ExponentPair {
            p: self.p,
            q: self.p - self.q,
        }
    }
}

/// Immutable table `u_0 ..= u_L` of Taylor coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTable {
    exponents: ExponentPair,
    coeffs: Vec<f64>,
}

impl ModeTable {
    pub(crate) fn from_parts(exponents: ExponentPair, coeffs: Vec<f64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        ModeTable { exponents, coeffs }
    }

    pub fn exponents(&self) -> ExponentPair {
        self.exponents
    }

    /// Highest index held (the `L` the table was built with).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.coeffs.get(k).copied()
    }

    /// Fails unless index `k` is covered.
    pub fn require(&self, k: usize) -> Result<()> {
        if k > self.order() {
            Err(Error::ModeTableTooShort {
                needed: k,
                available: self.order(),
            })
        } else {
            Ok(())
        }
    }

    /// A copy holding only `u_0 ..= u_order`.
    pub fn truncated(&self, order: usize) -> Result<ModeTable> {
        self.require(order)?;
        Ok(ModeTable {
            exponents: self.exponents,
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }
}

impl Index<usize> for ModeTable {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.coeffs[k]
    }
}

/// Taylor coefficients `u_0 ..= u_order` via the two-term recursion.
pub fn generate_modes(exponents: ExponentPair, order: usize) -> ModeTable {
    let two_s = 2.0 * exponents.exponent();
    let mut u = Vec::with_capacity(order + 1);
    u.push(1.0);
    if order >= 1 {
        u.push(two_s);
    }
    for k in 1..order {
        let next = (two_s * u[k] + (k as f64 - 1.0) * u[k - 1]) / (k as f64 + 1.0);
        u.push(next);
    }
    ModeTable::from_parts(exponents, u)
}

/// Same coefficients as [`generate_modes`], computed as the Cauchy product of
/// the binomial series of `(1+x)^s` and `(1-x)^(-s)` with `s = q/p`.
///
/// Quadratic in `order`; meant for cross-checking, not production tables.
pub fn generate_modes_oracle(exponents: ExponentPair, order: usize) -> ModeTable {
    let s = exponents.exponent();
    // (1+x)^s = sum binom(s, j) x^j
    let mut rising = Vec::with_capacity(order + 1);
    // (1-x)^(-s) = sum (s)_j / j! x^j
    let mut falling = Vec::with_capacity(order + 1);
    rising.push(1.0);
    falling.push(1.0);
    for j in 1..=order {
        let jf = j as f64;
        let prev_b = rising[j - 1];
        rising.push(prev_b * (s - jf + 1.0) / jf);
        let prev_p = falling[j - 1];
        falling.push(prev_p * (s + jf - 1.0) / jf);
    }
    let coeffs = (0..=order)
        .map(|k| {
            let mut acc = NeumaierSum::default();
            for j in 0..=k {
                acc.add(rising[j] * falling[k - j]);
            }
            acc.value()
        })
        .collect();
    ModeTable::from_parts(exponents, coeffs)
}

/// Compensated summation; the binomial terms alternate in sign.
#[derive(Default)]
pub(crate) struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_non_conjugate_exponents() {
        assert!(ExponentPair::new(5, 2).is_err());
        assert!(ExponentPair::new(1, 1).is_err());
        assert!(ExponentPair::new(3, 0).is_err());
        assert!(ExponentPair::new(3, 3).is_err());
        assert!(ExponentPair::new(5, 4).is_ok());
        assert_eq!(ExponentPair::new(2, 1).unwrap().conjugate(), ExponentPair::new(2, 1).unwrap());
    }

    #[test]
    fn third_modes_match_series_expansion() {
        // ((1+x)/(1-x))^(1/3) and ^(2/3), expanded by hand
        let a = generate_modes(ExponentPair::new(3, 1).unwrap(), 3);
        let b = generate_modes(ExponentPair::new(3, 2).unwrap(), 3);
        let want_a = [1.0, 2.0 / 3.0, 2.0 / 9.0, 22.0 / 81.0];
        let want_b = [1.0, 4.0 / 3.0, 8.0 / 9.0, 68.0 / 81.0];
        for k in 0..4 {
            assert_relative_eq!(a[k], want_a[k], max_relative = 1e-15);
            assert_relative_eq!(b[k], want_b[k], max_relative = 1e-15);
        }
    }

    #[test]
    fn zero_order_table_is_unit() {
        for (p, q) in [(2, 1), (3, 1), (3, 2), (7, 6)] {
            let e = ExponentPair::new(p, q).unwrap();
            assert_eq!(generate_modes(e, 0).coeffs(), &[1.0]);
            assert_eq!(generate_modes_oracle(e, 0).coeffs(), &[1.0]);
        }
    }

    #[test]
    fn oracle_small_cases() {
        let a = generate_modes_oracle(ExponentPair::new(3, 1).unwrap(), 2);
        assert_relative_eq!(a[1], 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(a[2], 2.0 / 9.0, max_relative = 1e-15);
        let b = generate_modes_oracle(ExponentPair::new(3, 2).unwrap(), 1);
        assert_relative_eq!(b[1], 4.0 / 3.0, max_relative = 1e-15);
        // sqrt((1+x)/(1-x)) = 1 + x + x^2/2 + x^3/2 + 3x^4/8 + ...
        let h = generate_modes_oracle(ExponentPair::new(2, 1).unwrap(), 4);
        for (k, want) in [1.0, 1.0, 0.5, 0.5, 0.375].iter().enumerate() {
            assert_relative_eq!(h[k], *want, max_relative = 1e-15);
        }
    }

    #[test]
    fn require_reports_coverage() {
        let t = generate_modes(ExponentPair::new(3, 1).unwrap(), 10);
        assert!(t.require(10).is_ok());
        assert!(matches!(
            t.require(11),
            Err(Error::ModeTableTooShort { needed: 11, available: 10 })
        ));
        assert_eq!(t.truncated(4).unwrap().order(), 4);
    }
}
