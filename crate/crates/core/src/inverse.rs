//! Closed-form inverse of `β M1ᵀ + α M2ᵀ`.
//!
//! For `α² / β² = cos²(π/p)` the inverse is, with `a = u^{1/p}`, `b = u^{1-1/p}`,
//! `e = 2n`, `o = 2m - 1`:
//!
//! ```text
//! X_{nm} = (-1)^{n+m} √e √o / (2 sin(π/p))
//!          · [ (1/β) (b_e a_o + a_e b_o) / (e - o) - (cos(π/p)/α) (b_e a_o - a_e b_o) / (e + o) ]
//! ```
//!
//! The limits `α = ±β` are handled separately: `(M1ᵀ + M2ᵀ)⁻¹ = M1 - M2` and
//! `(M1ᵀ - M2ᵀ)⁻¹ = M1 + M2`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{identity_deviation, CouplingMatrices};
use crate::error::{Error, Result};
use crate::modes::{ExponentPair, ModeTable};

/// Largest `p` recovered from `|α/β| = cos(π/p)`.
pub const MAX_P: u32 = 64;

/// Matching tolerance for `|α/β|` against `cos(π/p)`.
pub const RATIO_TOLERANCE: f64 = 1e-9;

/// Solved parameters of the generic ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseParams {
    pub alpha: f64,
    pub beta: f64,
    pub p: u32,
    pub alpha_prime: f64,
    pub beta_prime: f64,
    /// Set when the parameters came from the `(k, strings)` form.
    pub k: Option<u32>,
}

impl InverseParams {
    fn from_p(alpha: f64, beta: f64, p: u32, k: Option<u32>) -> InverseParams {
        let (s, c) = (PI / f64::from(p)).sin_cos();
        InverseParams {
            alpha,
            beta,
            p,
            alpha_prime: 1.0 / (2.0 * s * beta),
            beta_prime: -c / (2.0 * s * alpha),
            k,
        }
    }

    /// `β′α + α′β cos(π/p)` and `α′α + β′β cos(π/p)`; both vanish.
    pub fn condition_residuals(&self) -> (f64, f64) {
        let c = (PI / f64::from(self.p)).cos();
        (
            self.beta_prime * self.alpha + self.alpha_prime * self.beta * c,
            self.alpha_prime * self.alpha + self.beta_prime * self.beta * c,
        )
    }
}

/// The two limits `α = β` and `α = -β` where `cos(π/p) = 1` has no finite `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecialInverse {
    /// `(M1ᵀ + M2ᵀ)⁻¹ = M1 - M2`
    Plus,
    /// `(M1ᵀ - M2ᵀ)⁻¹ = M1 + M2`
    Minus,
}

/// How a given `(α, β)` is inverted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseRoute {
    Ansatz(InverseParams),
    Special { which: SpecialInverse, beta: f64 },
}

/// Recovers `p` and the primed constants from `(α, β)`.
pub fn solve_params(alpha: f64, beta: f64) -> Result<InverseRoute> {
    if !(alpha.is_finite() && beta.is_finite()) || alpha == 0.0 || beta == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "alpha and beta must be finite and nonzero, got ({alpha}, {beta})"
        )));
    }
    let ratio = alpha / beta;
    if (ratio - 1.0).abs() <= RATIO_TOLERANCE {
        return Ok(InverseRoute::Special {
            which: SpecialInverse::Plus,
            beta,
        });
    }
    if (ratio + 1.0).abs() <= RATIO_TOLERANCE {
        return Ok(InverseRoute::Special {
            which: SpecialInverse::Minus,
            beta,
        });
    }
    let p = (2..=MAX_P)
        .find(|&p| ((PI / f64::from(p)).cos() - ratio.abs()).abs() <= RATIO_TOLERANCE)
        .ok_or(Error::ParameterDomain { ratio: ratio.abs() })?;
    Ok(InverseRoute::Ansatz(InverseParams::from_p(alpha, beta, p, None)))
}

/// Parameters for `M1ᵀ + cos(kπ/N) M2ᵀ` with `N` strings, `1 ≤ k ≤ 2N`.
///
/// `1/p = k/N` for `k < N` and `(2N - k)/N` for `k > N`; only integer
/// `2 ≤ p ≤ 64` are accepted. `k = N` and `k = 2N` are the special limits.
pub fn params_for_strings(k: u32, strings: u32) -> Result<InverseRoute> {
    if strings == 0 || k == 0 || k > 2 * strings {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= 2N with N >= 1, got k={k}, N={strings}"
        )));
    }
    let alpha = (f64::from(k) * PI / f64::from(strings)).cos();
    if k == strings {
        return Ok(InverseRoute::Special {
            which: SpecialInverse::Minus,
            beta: 1.0,
        });
    }
    if k == 2 * strings {
        return Ok(InverseRoute::Special {
            which: SpecialInverse::Plus,
            beta: 1.0,
        });
    }
    let denom = if k < strings { k } else { 2 * strings - k };
    if !strings.is_multiple_of(denom) || !(2..=MAX_P).contains(&(strings / denom)) {
        return Err(Error::ParameterDomain { ratio: alpha.abs() });
    }
    let p = strings / denom;
    Ok(InverseRoute::Ansatz(InverseParams::from_p(alpha, 1.0, p, Some(k))))
}

/// A dense `N × N` inverse, 1-based in the accessor.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseMatrix {
    n: usize,
    entries: DMatrix<f64>,
}

impl InverseMatrix {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn at(&self, n: usize, m: usize) -> f64 {
        self.entries[(n - 1, m - 1)]
    }
}

/// One entry of the ansatz; `a`, `b` are the `1/p` and `1 - 1/p` tables.
pub fn ansatz_entry(params: &InverseParams, a: &[f64], b: &[f64], n: usize, m: usize) -> f64 {
    let (s, c) = (PI / f64::from(params.p)).sin_cos();
    let (e, o) = (2 * n, 2 * m - 1);
    let (ef, of) = (e as f64, o as f64);
    let x = b[e] * a[o];
    let y = a[e] * b[o];
    let sign = if (n + m).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * ef.sqrt() * of.sqrt() / (2.0 * s)
        * ((x + y) / (ef - of) / params.beta - c / params.alpha * (x - y) / (ef + of))
}

/// Dense ansatz inverse of order `n`.
pub fn ansatz_inverse(
    params: &InverseParams,
    modes_a: &ModeTable,
    modes_b: &ModeTable,
    n: usize,
) -> Result<InverseMatrix> {
    let want_a = ExponentPair::lower(params.p)?;
    if modes_a.exponents() != want_a || modes_b.exponents() != want_a.conjugate() {
        return Err(Error::InvalidArgument(format!(
            "mode tables must have exponents 1/{p} and {q}/{p}",
            p = params.p,
            q = params.p - 1
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("inverse order must be >= 1".into()));
    }
    modes_a.require(2 * n)?;
    modes_b.require(2 * n)?;
    let (a, b) = (modes_a.coeffs(), modes_b.coeffs());
    Ok(InverseMatrix {
        n,
        entries: DMatrix::from_fn(n, n, |i, j| ansatz_entry(params, a, b, i + 1, j + 1)),
    })
}

/// `M1 - M2` or `M1 + M2`.
pub fn special_inverse(which: SpecialInverse, coupling: &CouplingMatrices) -> InverseMatrix {
    let entries = match which {
        SpecialInverse::Plus => coupling.m1() - coupling.m2(),
        SpecialInverse::Minus => coupling.m1() + coupling.m2(),
    };
    InverseMatrix {
        n: coupling.order(),
        entries,
    }
}

/// The matrix being inverted, `β M1ᵀ + α M2ᵀ`.
pub fn forward_matrix(alpha: f64, beta: f64, coupling: &CouplingMatrices) -> DMatrix<f64> {
    coupling.m1().transpose() * beta + coupling.m2().transpose() * alpha
}

/// Dense LU inverse of `β M1ᵀ + α M2ᵀ`; independent of the mode tables.
pub fn numeric_inverse(alpha: f64, beta: f64, coupling: &CouplingMatrices) -> Result<InverseMatrix> {
    let entries = forward_matrix(alpha, beta, coupling)
        .lu()
        .try_inverse()
        .ok_or(Error::Singular)?;
    Ok(InverseMatrix {
        n: coupling.order(),
        entries,
    })
}

/// Window residuals of `X K - I` (left) and `K X - I` (right).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseResiduals {
    pub window: usize,
    pub left: f64,
    pub right: f64,
}

pub fn inverse_residuals(
    inverse: &InverseMatrix,
    alpha: f64,
    beta: f64,
    coupling: &CouplingMatrices,
    window: usize,
) -> Result<InverseResiduals> {
    if inverse.order() != coupling.order() {
        return Err(Error::InvalidArgument(format!(
            "inverse of order {} does not match coupling of order {}",
            inverse.order(),
            coupling.order()
        )));
    }
    let k = forward_matrix(alpha, beta, coupling);
    Ok(InverseResiduals {
        window,
        left: identity_deviation(&(&inverse.entries * &k), window),
        right: identity_deviation(&(&k * &inverse.entries), window),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_coupling;
    use crate::modes::generate_modes;
    use approx::assert_abs_diff_eq;

    fn p3_params() -> InverseParams {
        match solve_params(0.5, 1.0).unwrap() {
            InverseRoute::Ansatz(p) => p,
            other => panic!("unexpected route {other:?}"),
        }
    }

    #[test]
    fn half_beta_one_gives_p3() {
        let p = p3_params();
        assert_eq!(p.p, 3);
        assert_abs_diff_eq!(p.alpha_prime, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.beta_prime, -1.0 / 3f64.sqrt(), epsilon = 1e-15);
        let (c1, c2) = p.condition_residuals();
        assert!(c1.abs() <= 1e-14 && c2.abs() <= 1e-14);
    }

    #[test]
    fn special_routes() {
        assert!(matches!(
            solve_params(1.0, 1.0).unwrap(),
            InverseRoute::Special { which: SpecialInverse::Plus, .. }
        ));
        assert!(matches!(
            solve_params(-1.0, 1.0).unwrap(),
            InverseRoute::Special { which: SpecialInverse::Minus, .. }
        ));
        assert!(matches!(solve_params(0.3, 1.0), Err(Error::ParameterDomain { .. })));
        assert!(solve_params(0.0, 1.0).is_err());
    }

    #[test]
    fn string_parameterization() {
        let InverseRoute::Ansatz(p) = params_for_strings(1, 3).unwrap() else {
            panic!("expected ansatz")
        };
        assert_eq!((p.p, p.k), (3, Some(1)));
        assert_abs_diff_eq!(p.alpha, 0.5, epsilon = 1e-15);
        // α′ = -β′ = 1/(2 sin(π/p)) on this branch
        assert_abs_diff_eq!(p.alpha_prime, -p.beta_prime, epsilon = 1e-15);
        let InverseRoute::Ansatz(p) = params_for_strings(7, 4).unwrap() else {
            panic!("expected ansatz")
        };
        assert_eq!(p.p, 4);
        assert!(matches!(
            params_for_strings(3, 3).unwrap(),
            InverseRoute::Special { which: SpecialInverse::Minus, .. }
        ));
        assert!(matches!(
            params_for_strings(6, 3).unwrap(),
            InverseRoute::Special { which: SpecialInverse::Plus, .. }
        ));
        assert!(matches!(params_for_strings(2, 3), Err(Error::ParameterDomain { .. })));
        assert!(params_for_strings(7, 3).is_err());
    }

    #[test]
    fn leading_entry() {
        let p = p3_params();
        let a = generate_modes(ExponentPair::new(3, 1).unwrap(), 8);
        let b = generate_modes(ExponentPair::new(3, 2).unwrap(), 8);
        let x = ansatz_inverse(&p, &a, &b, 4).unwrap();
        // (√2/√3)(64/81)
        assert_abs_diff_eq!(x.at(1, 1), (2.0f64 / 3.0).sqrt() * 64.0 / 81.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x.at(1, 1), 0.6452, epsilon = 1e-4);
        assert!(ansatz_inverse(&p, &a, &b, 5).is_err());
        assert!(ansatz_inverse(&p, &b, &a, 4).is_err());
    }

    #[test]
    fn special_plus_entry() {
        let c = build_coupling(4).unwrap();
        let x = special_inverse(SpecialInverse::Plus, &c);
        assert_abs_diff_eq!(x.at(1, 1), 0.600210, epsilon = 1e-6);
    }

    #[test]
    fn numeric_inverse_inverts() {
        let c = build_coupling(32).unwrap();
        let x = numeric_inverse(0.5, 1.0, &c).unwrap();
        let r = inverse_residuals(&x, 0.5, 1.0, &c, 32).unwrap();
        assert!(r.left < 1e-10 && r.right < 1e-10);
    }
}
