//! Change of basis between full-string and half-string modes.
//!
//! Stacked vectors have dimension `2N + 1`:
//!
//! ```text
//! full side: [x_0; x_1, x_3, ..., x_{2N-1}; x_2, x_4, ..., x_{2N}]
//! half side: [x_M; x^L_1 .. x^L_N;          x^R_1 .. x^R_N]
//! ```
//!
//! Momenta use the same layout with `p` in place of `x`.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex;

/// The coupling matrices `M1`, `M2` at truncation `N`.
///
/// `(M1)_{mn} = (2/π) √(2m/(2n-1)) (-1)^{m+n} / (2m - (2n-1))`, and `M2` has
/// `2m + (2n-1)` in the denominator. Indices are 1-based in the accessors and
/// shifted by one in the stored matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices {
    n: usize,
    m1: DMatrix<f64>,
    m2: DMatrix<f64>,
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn m1_entry(m: usize, n: usize) -> f64 {
    let (mf, of) = (m as f64, 2.0 * n as f64 - 1.0);
    2.0 / PI * (2.0 * mf / of).sqrt() * sign(m + n) / (2.0 * mf - of)
}

pub(crate) fn m2_entry(m: usize, n: usize) -> f64 {
    let (mf, of) = (m as f64, 2.0 * n as f64 - 1.0);
    2.0 / PI * (2.0 * mf / of).sqrt() * sign(m + n) / (2.0 * mf + of)
}

/// Dense `M1`, `M2` of order `n`.
pub fn build_coupling(n: usize) -> Result<CouplingMatrices> {
    if n == 0 {
        return Err(Error::InvalidArgument("coupling order must be >= 1".into()));
    }
    Ok(CouplingMatrices {
        n,
        m1: DMatrix::from_fn(n, n, |i, j| m1_entry(i + 1, j + 1)),
        m2: DMatrix::from_fn(n, n, |i, j| m2_entry(i + 1, j + 1)),
    })
}

impl CouplingMatrices {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn m1(&self) -> &DMatrix<f64> {
        &self.m1
    }

    pub fn m2(&self) -> &DMatrix<f64> {
        &self.m2
    }

    /// `(M1)_{mn}`, 1-based.
    pub fn m1_at(&self, m: usize, n: usize) -> f64 {
        self.m1[(m - 1, n - 1)]
    }

    /// `(M2)_{mn}`, 1-based.
    pub fn m2_at(&self, m: usize, n: usize) -> f64 {
        self.m2[(m - 1, n - 1)]
    }
}

/// The four commutator-derived identities of `M1`, `M2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MIdentity {
    /// `M1ᵀM1 - M2ᵀM2 = I`
    TransposeFirstDiff,
    /// `M1ᵀM2 - M2ᵀM1 = 0`
    TransposeFirstCommutator,
    /// `M1M1ᵀ - M2M2ᵀ = I`
    TransposeLastDiff,
    /// `M1M2ᵀ - M2M1ᵀ = 0`
    TransposeLastCommutator,
}

impl MIdentity {
    pub const ALL: [MIdentity; 4] = [
        MIdentity::TransposeFirstDiff,
        MIdentity::TransposeFirstCommutator,
        MIdentity::TransposeLastDiff,
        MIdentity::TransposeLastCommutator,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MIdentity::TransposeFirstDiff => "m1t_m1_minus_m2t_m2",
            MIdentity::TransposeFirstCommutator => "m1t_m2_minus_m2t_m1",
            MIdentity::TransposeLastDiff => "m1_m1t_minus_m2_m2t",
            MIdentity::TransposeLastCommutator => "m1_m2t_minus_m2_m1t",
        }
    }

    /// Full product; compare against `I` or `0` per [`MIdentity::target_is_identity`].
    pub fn product(&self, c: &CouplingMatrices) -> DMatrix<f64> {
        let (m1, m2) = (&c.m1, &c.m2);
        match self {
            MIdentity::TransposeFirstDiff => m1.tr_mul(m1) - m2.tr_mul(m2),
            MIdentity::TransposeFirstCommutator => m1.tr_mul(m2) - m2.tr_mul(m1),
            MIdentity::TransposeLastDiff => m1 * m1.transpose() - m2 * m2.transpose(),
            MIdentity::TransposeLastCommutator => m1 * m2.transpose() - m2 * m1.transpose(),
        }
    }

    pub fn target_is_identity(&self) -> bool {
        matches!(self, MIdentity::TransposeFirstDiff | MIdentity::TransposeLastDiff)
    }

    /// Max abs deviation on the leading `window × window` block.
    pub fn residual(&self, c: &CouplingMatrices, window: usize) -> f64 {
        let p = self.product(c);
        if self.target_is_identity() {
            identity_deviation(&p, window)
        } else {
            block_max_abs(&p, window)
        }
    }
}

/// `max |A_ij - δ_ij|` over `i, j < window`.
pub fn identity_deviation<T: nalgebra::ComplexField<RealField = f64>>(a: &DMatrix<T>, window: usize) -> f64 {
    let w = window.min(a.nrows()).min(a.ncols());
    let mut worst = 0.0f64;
    for i in 0..w {
        for j in 0..w {
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((a[(i, j)].clone() - target).modulus());
        }
    }
    worst
}

/// `max |A_ij|` over `i, j < window`.
pub fn block_max_abs<T: nalgebra::ComplexField<RealField = f64>>(a: &DMatrix<T>, window: usize) -> f64 {
    let w = window.min(a.nrows()).min(a.ncols());
    let mut worst = 0.0f64;
    for i in 0..w {
        for j in 0..w {
            worst = worst.max(a[(i, j)].clone().modulus());
        }
    }
    worst
}

/// Which variables a [`BasisMap`] transforms, and in which direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    CoordFullToHalf,
    CoordHalfToFull,
    MomFullToHalf,
    MomHalfToFull,
}

impl BasisKind {
    pub fn name(&self) -> &'static str {
        match self {
            BasisKind::CoordFullToHalf => "coord_full_to_half",
            BasisKind::CoordHalfToFull => "coord_half_to_full",
            BasisKind::MomFullToHalf => "mom_full_to_half",
            BasisKind::MomHalfToFull => "mom_half_to_full",
        }
    }

    /// The map undoing this one.
    pub fn inverse(&self) -> BasisKind {
        match self {
            BasisKind::CoordFullToHalf => BasisKind::CoordHalfToFull,
            BasisKind::CoordHalfToFull => BasisKind::CoordFullToHalf,
            BasisKind::MomFullToHalf => BasisKind::MomHalfToFull,
            BasisKind::MomHalfToFull => BasisKind::MomFullToHalf,
        }
    }
}

/// A `(2N+1) × (2N+1)` linear map between stacked mode vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMap {
    kind: BasisKind,
    n: usize,
    matrix: DMatrix<f64>,
}

impl BasisMap {
    pub fn new(kind: BasisKind, n: usize) -> Result<BasisMap> {
        let c = build_coupling(n)?;
        Ok(Self::from_coupling(kind, &c))
    }

    pub fn from_coupling(kind: BasisKind, c: &CouplingMatrices) -> BasisMap {
        let n = c.order();
        let matrix = match kind {
            BasisKind::CoordFullToHalf => coord_forward(c),
            BasisKind::CoordHalfToFull => coord_inverse(c),
            BasisKind::MomFullToHalf => mom_forward(c),
            BasisKind::MomHalfToFull => mom_inverse(c),
        };
        BasisMap { kind, n, matrix }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// Position of odd mode / left mode `k` (1-based) in the stacked vector.
    pub fn first_block(&self, k: usize) -> usize {
        k
    }

    /// Position of even mode / right mode `k` (1-based) in the stacked vector.
    pub fn second_block(&self, k: usize) -> usize {
        self.n + k
    }

    pub fn apply(&self, v: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
        &self.matrix * v
    }

    /// Max abs deviation of `other · self` from the identity, restricted to
    /// the rows and columns of the zero mode and of modes `1..=window` in both
    /// blocks.
    pub fn round_trip_residual(&self, other: &BasisMap, window: usize) -> Result<f64> {
        if other.kind != self.kind.inverse() || other.n != self.n {
            return Err(Error::InvalidArgument(format!(
                "{} at N={} does not invert {} at N={}",
                other.kind.name(),
                other.n,
                self.kind.name(),
                self.n
            )));
        }
        let prod = &other.matrix * &self.matrix;
        let w = window.min(self.n);
        let idx: Vec<usize> = std::iter::once(0)
            .chain(1..=w)
            .chain((1..=w).map(|k| self.n + k))
            .collect();
        let mut worst = 0.0f64;
        for &i in &idx {
            for &j in &idx {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).abs());
            }
        }
        Ok(worst)
    }
}

pub fn coord_full_to_half(n: usize) -> Result<BasisMap> {
    BasisMap::new(BasisKind::CoordFullToHalf, n)
}

pub fn coord_half_to_full(n: usize) -> Result<BasisMap> {
    BasisMap::new(BasisKind::CoordHalfToFull, n)
}

pub fn mom_full_to_half(n: usize) -> Result<BasisMap> {
    BasisMap::new(BasisKind::MomFullToHalf, n)
}

pub fn mom_half_to_full(n: usize) -> Result<BasisMap> {
    BasisMap::new(BasisKind::MomHalfToFull, n)
}

// x^L_n = x_{2n-1} + Σ_m √(2m/(2n-1)) (M1+M2)_{mn} x_{2m}, x^R_n with -x_{2n-1},
// x_M = x_0 + √2 Σ_n (-1)^n x_{2n}
fn coord_forward(c: &CouplingMatrices) -> DMatrix<f64> {
    let n = c.order();
    let mut t = DMatrix::zeros(2 * n + 1, 2 * n + 1);
    t[(0, 0)] = 1.0;
    for k in 1..=n {
        t[(0, n + k)] = SQRT_2 * sign(k);
    }
    for row in 1..=n {
        t[(row, row)] = 1.0;
        t[(n + row, row)] = -1.0;
        let o = 2.0 * row as f64 - 1.0;
        for m in 1..=n {
            let v = (2.0 * m as f64 / o).sqrt() * (c.m1_at(m, row) + c.m2_at(m, row));
            t[(row, n + m)] = v;
            t[(n + row, n + m)] = v;
        }
    }
    t
}

// x_{2n-1} = ½(x^L_n - x^R_n),
// x_{2n} = ½ Σ_m √((2m-1)/(2n)) (M1-M2)_{nm} (x^L_m + x^R_m),
// x_0 = x_M - (√2/π) Σ_n (-1)^n/(2n-1) (x^L_n + x^R_n)
fn coord_inverse(c: &CouplingMatrices) -> DMatrix<f64> {
    let n = c.order();
    let mut t = DMatrix::zeros(2 * n + 1, 2 * n + 1);
    t[(0, 0)] = 1.0;
    for k in 1..=n {
        let w = -SQRT_2 / PI * sign(k) / (2.0 * k as f64 - 1.0);
        t[(0, k)] = w;
        t[(0, n + k)] = w;
    }
    for row in 1..=n {
        t[(row, row)] = 0.5;
        t[(row, n + row)] = -0.5;
        let e = 2.0 * row as f64;
        for m in 1..=n {
            let v = 0.5 * ((2.0 * m as f64 - 1.0) / e).sqrt() * (c.m1_at(row, m) - c.m2_at(row, m));
            t[(n + row, m)] = v;
            t[(n + row, n + m)] = v;
        }
    }
    t
}

// p^L_n = ½ p_{2n-1} + ½ Σ_m √((2n-1)/(2m)) (M1-M2)_{mn} p_{2m} - (√2/π) (-1)^n/(2n-1) p_0,
// p^R_n with -½ p_{2n-1}, p_M = p_0
fn mom_forward(c: &CouplingMatrices) -> DMatrix<f64> {
    let n = c.order();
    let mut t = DMatrix::zeros(2 * n + 1, 2 * n + 1);
    t[(0, 0)] = 1.0;
    for row in 1..=n {
        let o = 2.0 * row as f64 - 1.0;
        let zero = -SQRT_2 / PI * sign(row) / o;
        t[(row, 0)] = zero;
        t[(n + row, 0)] = zero;
        t[(row, row)] = 0.5;
        t[(n + row, row)] = -0.5;
        for m in 1..=n {
            let v = 0.5 * (o / (2.0 * m as f64)).sqrt() * (c.m1_at(m, row) - c.m2_at(m, row));
            t[(row, n + m)] = v;
            t[(n + row, n + m)] = v;
        }
    }
    t
}

// p_{2n-1} = p^L_n - p^R_n,
// p_{2n} = Σ_m √(2n/(2m-1)) (M1+M2)_{nm} (p^L_m + p^R_m) + √2 (-1)^n p_M, p_0 = p_M
fn mom_inverse(c: &CouplingMatrices) -> DMatrix<f64> {
    let n = c.order();
    let mut t = DMatrix::zeros(2 * n + 1, 2 * n + 1);
    t[(0, 0)] = 1.0;
    for row in 1..=n {
        t[(row, row)] = 1.0;
        t[(row, n + row)] = -1.0;
        let e = 2.0 * row as f64;
        t[(n + row, 0)] = SQRT_2 * sign(row);
        for m in 1..=n {
            let v = (e / (2.0 * m as f64 - 1.0)).sqrt() * (c.m1_at(row, m) + c.m2_at(row, m));
            t[(n + row, m)] = v;
            t[(n + row, n + m)] = v;
        }
    }
    t
}

/// The `Z_3` Fourier transform `T = (1/√3) [[e, ē, 1], [ē, e, 1], [1, 1, 1]]`,
/// `e = exp(2πi/3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Z3Transform {
    t: Matrix3<Complex>,
}

impl Default for Z3Transform {
    fn default() -> Self {
        Self::new()
    }
}

impl Z3Transform {
    pub fn new() -> Self {
        let e = Complex::from_polar(1.0, 2.0 * PI / 3.0);
        let eb = e.conj();
        let one = Complex::new(1.0, 0.0);
        let t = Matrix3::new(e, eb, one, eb, e, one, one, one, one) / Complex::new(3f64.sqrt(), 0.0);
        Z3Transform { t }
    }

    pub fn matrix(&self) -> &Matrix3<Complex> {
        &self.t
    }

    /// The cyclic shift `S_{jk} = δ_{j, k+1 mod 3}`.
    pub fn shift() -> Matrix3<Complex> {
        Matrix3::from_fn(|j, k| {
            if j == (k + 1) % 3 {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
    }

    /// `max |T T† - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.t * self.t.adjoint() - Matrix3::identity();
        p.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `T S T†`; diagonal with unit-modulus entries.
    pub fn conjugated_shift(&self) -> Matrix3<Complex> {
        self.t * Self::shift() * self.t.adjoint()
    }
}

pub fn z3_apply(t: &Z3Transform, v: &Vector3<Complex>) -> Vector3<Complex> {
    t.t * v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    #[test]
    fn coupling_spot_values() {
        let c = build_coupling(4).unwrap();
        assert_abs_diff_eq!(c.m1_at(1, 1), 2.0 * SQRT_2 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(c.m1_at(1, 1), 0.900316, epsilon = 1e-6);
        assert_abs_diff_eq!(c.m2_at(1, 1), 2.0 * SQRT_2 / (3.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(c.m2_at(1, 1), 0.300105, epsilon = 1e-6);
        assert_abs_diff_eq!(c.m1_at(1, 2), 2.0 / PI * (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        // commonly quoted as 0.519720; the formula gives 0.5197979
        assert_abs_diff_eq!(c.m1_at(1, 2), 0.519720, epsilon = 1e-4);
        assert!(build_coupling(0).is_err());
    }

    #[test]
    fn coupling_sign_pattern() {
        let c = build_coupling(20).unwrap();
        for m in 1..=20 {
            for n in 1..=20 {
                let prod = c.m1_at(m, n) * c.m2_at(m, n);
                if 2 * m > 2 * n - 1 {
                    assert!(prod > 0.0);
                } else {
                    assert!(prod < 0.0);
                }
                assert_eq!(c.m2_at(m, n).signum(), sign(m + n));
            }
        }
    }

    #[test]
    fn forward_odd_rows_are_plus_minus_one() {
        let f = coord_full_to_half(6).unwrap();
        for k in 1..=6 {
            assert_eq!(f.matrix()[(f.first_block(k), k)], 1.0);
            assert_eq!(f.matrix()[(f.second_block(k), k)], -1.0);
        }
        let inv = coord_half_to_full(6).unwrap();
        for k in 1..=6 {
            assert_eq!(inv.matrix()[(k, inv.first_block(k))], 0.5);
            assert_eq!(inv.matrix()[(k, inv.second_block(k))], -0.5);
        }
    }

    #[test]
    fn momentum_rows() {
        let f = mom_full_to_half(5).unwrap();
        assert_eq!(f.matrix()[(1, 1)], 0.5);
        assert_eq!(f.matrix()[(6, 1)], -0.5);
        let row0: Vec<f64> = f.matrix().row(0).iter().copied().collect();
        assert_eq!(row0[0], 1.0);
        assert!(row0[1..].iter().all(|&x| x == 0.0));
        let inv = mom_half_to_full(5).unwrap();
        for k in 1..=5 {
            assert_abs_diff_eq!(inv.matrix()[(5 + k, 0)], SQRT_2 * sign(k), epsilon = 1e-15);
        }
    }

    #[test]
    fn degenerate_order_one() {
        for kind in [
            BasisKind::CoordFullToHalf,
            BasisKind::CoordHalfToFull,
            BasisKind::MomFullToHalf,
            BasisKind::MomHalfToFull,
        ] {
            let m = BasisMap::new(kind, 1).unwrap();
            assert_eq!(m.matrix().shape(), (3, 3));
            assert!(m.matrix().iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn round_trip_checks_kinds() {
        let f = coord_full_to_half(8).unwrap();
        let g = mom_half_to_full(8).unwrap();
        assert!(f.round_trip_residual(&g, 2).is_err());
        let v = DVector::from_fn(17, |i, _| i as f64);
        assert_eq!(f.apply(&v).len(), 17);
    }

    #[test]
    fn z3_examples() {
        let t = Z3Transform::new();
        let one = Complex::new(1.0, 0.0);
        let out = z3_apply(&t, &Vector3::new(one, one, one));
        assert_abs_diff_eq!(out[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((out[2] - Complex::new(3f64.sqrt(), 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert!(t.unitarity_defect() < 1e-14);
        let d = t.conjugated_shift();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(d[(i, j)].norm() < 1e-14);
                }
            }
            assert_abs_diff_eq!(d[(i, i)].norm(), 1.0, epsilon = 1e-14);
        }
        let e = Complex::from_polar(1.0, 2.0 * PI / 3.0);
        let mut diag: Vec<Complex> = (0..3).map(|i| d[(i, i)]).collect();
        for target in [e, e.conj(), one] {
            let pos = diag.iter().position(|z| (z - target).norm() < 1e-14).unwrap();
            diag.remove(pos);
        }
    }
}
