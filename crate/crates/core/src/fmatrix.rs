//! The coupling matrix `F` of the three-string vertex, indexed from 0.
//!
//! With `a_k`, `b_k` the modes of exponents 1/3 and 2/3, `g = F00 - 1`,
//! `e = 2n` even and `o = 2m - 1` odd:
//!
//! ```text
//! F_00       = (L - 1)/(L + 1),  L = ln(27/16)
//! F_e0       = g (-1)^n a_e / √e                                   = F_0e
//! F_o0       = i g (-1)^m a_o / √o                                 = conj F_0o
//! F_eo       = -i (-1)^{n+m} [ √(eo)/2 · (P/(e-o) + Q/(e+o)) + g a_e a_o / √(eo) ]
//!              P = a_e b_o + b_e a_o,  Q = a_e b_o - b_e a_o
//! F_oe       = conj F_eo
//! F_ij (i≠j even) = (-1)^{n+k} [ g a_i a_j/√(ij) - √(ij)/2 · (P/(i+j) + Q/(i-j)) ]
//! F_ij (i≠j odd)  = (-1)^{n+k} [ g a_i a_j/√(ij) + √(ij)/2 · (P/(i+j) + Q/(i-j)) ]
//! F_ii (even)     = g a²/i - ab/2 - 1/2 - (√3 i/2π) (a S̃ᵇ_i - b S̃ᵃ_i)
//! F_ii (odd)      = g a²/i + ab/2 + 1/2 + (√3 i/2π) (a Ẽᵇ_i - b Ẽᵃ_i)
//! ```
//!
//! where `n, k` are the half-indices (`i = 2n` or `2n - 1`). The diagonal needs
//! the squared-denominator sums of [`crate::sums`].

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{block_max_abs, identity_deviation, CouplingMatrices};
use crate::error::{Error, Result};
use crate::extrapolate::{extrapolated_sum, Ladder, SumConfig, SumValue};
use crate::modes::{ExponentPair, ModeTable};
use crate::sums::{sum_etilde, sum_stilde, Sign};
use crate::Complex;

/// Structural invariants hold to this tolerance after assembly.
pub const STRUCTURE_TOLERANCE: f64 = 1e-12;

/// `ln(27/16) = 3 ln 3 - 4 ln 2`.
pub fn log_27_16() -> f64 {
    3.0 * 3f64.ln() - 4.0 * 2f64.ln()
}

/// `F00`, from `(1 + F00)/(1 - F00) = ln(27/16)`.
pub fn f00() -> f64 {
    let l = log_27_16();
    (l - 1.0) / (l + 1.0)
}

/// Series route to `F00`: invert `(1+F)/(1-F) = 2 Σ a_{2n}/(2n)`.
pub fn f00_from_log(log_value: f64) -> f64 {
    (log_value - 1.0) / (log_value + 1.0)
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Half-index: `2n → n`, `2n - 1 → n`.
fn half(i: usize) -> usize {
    i.div_ceil(2)
}

/// The twist `C = diag((-1)^n)`, `n = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CMatrix {
    n: usize,
}

impl CMatrix {
    pub fn new(n: usize) -> CMatrix {
        CMatrix { n }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn diag(&self, k: usize) -> f64 {
        sign(k)
    }

    pub fn to_real(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n + 1, self.n + 1, |i, j| if i == j { sign(i) } else { 0.0 })
    }

    pub fn to_complex(&self) -> DMatrix<Complex> {
        self.to_real().map(|x| Complex::new(x, 0.0))
    }
}

/// Element evaluator holding the `p = 3` mode tables.
#[derive(Debug, Clone)]
pub struct FBuilder {
    a: ModeTable,
    b: ModeTable,
    f00: f64,
    cfg: SumConfig,
}

/// Squared-denominator sums behind one diagonal entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalSums {
    pub index: usize,
    /// `S̃` for even indices, `Ẽ` for odd ones.
    pub sum_a: SumValue,
    pub sum_b: SumValue,
}

impl FBuilder {
    pub fn new(a: ModeTable, b: ModeTable, cfg: SumConfig) -> Result<FBuilder> {
        cfg.validate()?;
        if a.exponents() != ExponentPair::new(3, 1)? || b.exponents() != ExponentPair::new(3, 2)? {
            return Err(Error::InvalidArgument(
                "F needs the mode tables of exponents 1/3 and 2/3".into(),
            ));
        }
        Ok(FBuilder { a, b, f00: f00(), cfg })
    }

    /// Mode index needed to assemble `F` of order `n` under `cfg`.
    pub fn modes_needed(n: usize, cfg: &SumConfig) -> usize {
        n.max(2 * cfg.sum_order)
    }

    pub fn cfg(&self) -> &SumConfig {
        &self.cfg
    }

    pub fn modes(&self) -> (&ModeTable, &ModeTable) {
        (&self.a, &self.b)
    }

    fn need(&self, i: usize) -> Result<()> {
        self.a.require(i)?;
        self.b.require(i)
    }

    /// Sums for the diagonal entry at `i ≥ 1`.
    pub fn diagonal_sums(&self, i: usize) -> Result<DiagonalSums> {
        let (sum_a, sum_b) = if i.is_multiple_of(2) {
            (
                sum_stilde(Sign::Plus, i, &self.a, &self.cfg)?,
                sum_stilde(Sign::Plus, i, &self.b, &self.cfg)?,
            )
        } else {
            (
                sum_etilde(Sign::Plus, i, &self.a, &self.cfg)?,
                sum_etilde(Sign::Plus, i, &self.b, &self.cfg)?,
            )
        };
        for (name, s) in [("a", &sum_a), ("b", &sum_b)] {
            s.within(format!("diagonal sum {name} at index {i}"), self.cfg.tolerance)?;
        }
        Ok(DiagonalSums { index: i, sum_a, sum_b })
    }

    /// Diagonal entry from precomputed sums.
    pub fn diagonal_from_sums(&self, sums: &DiagonalSums) -> Result<Complex> {
        let i = sums.index;
        self.need(i)?;
        let (a, b) = (self.a[i], self.b[i]);
        let fi = i as f64;
        let g = self.f00 - 1.0;
        let mixed = a * sums.sum_b.value - b * sums.sum_a.value;
        let v = if i.is_multiple_of(2) {
            g * a * a / fi - 0.5 * a * b - 0.5 - fi / PI * 3f64.sqrt() / 2.0 * mixed
        } else {
            g * a * a / fi + 0.5 * a * b + 0.5 + 3f64.sqrt() / (2.0 * PI) * fi * mixed
        };
        Ok(Complex::new(v, 0.0))
    }

    /// Any entry except the diagonal `i = j ≥ 1`, which needs sums.
    pub fn off_diagonal(&self, i: usize, j: usize) -> Result<Complex> {
        self.need(i.max(j))?;
        let (a, b) = (self.a.coeffs(), self.b.coeffs());
        let g = self.f00 - 1.0;
        let re = |x: f64| Complex::new(x, 0.0);
        let im = |x: f64| Complex::new(0.0, x);
        Ok(match (i, j) {
            (0, 0) => re(self.f00),
            (e, 0) | (0, e) if e % 2 == 0 => re(g * sign(half(e)) * a[e] / (e as f64).sqrt()),
            (o, 0) => im(g * sign(half(o)) * a[o] / (o as f64).sqrt()),
            (0, o) => im(-g * sign(half(o)) * a[o] / (o as f64).sqrt()),
            (i, j) if i == j => {
                return Err(Error::InvalidArgument(format!(
                    "diagonal entry ({i},{i}) needs the summation route"
                )))
            }
            (i, j) if i % 2 != j % 2 => {
                let (e, o) = if i % 2 == 0 { (i, j) } else { (j, i) };
                let (ef, of) = (e as f64, o as f64);
                let root = (ef * of).sqrt();
                let p = a[e] * b[o] + b[e] * a[o];
                let q = a[e] * b[o] - b[e] * a[o];
                let v = -sign(half(e) + half(o)) * (root / 2.0 * (p / (ef - of) + q / (ef + of)) + g * a[e] * a[o] / root);
                // F_eo = i v, F_oe = conj(F_eo)
                if i % 2 == 0 {
                    im(v)
                } else {
                    im(-v)
                }
            }
            (i, j) => {
                let (fi, fj) = (i as f64, j as f64);
                let root = (fi * fj).sqrt();
                let p = a[i] * b[j] + b[i] * a[j];
                let q = a[i] * b[j] - b[i] * a[j];
                let kernel = root / 2.0 * (p / (fi + fj) + q / (fi - fj));
                let rank_one = g * a[i] * a[j] / root;
                let parity = if i % 2 == 0 { -1.0 } else { 1.0 };
                re(sign(half(i) + half(j)) * (rank_one + parity * kernel))
            }
        })
    }

    /// Entry `(i, j)`, computing diagonal sums on demand.
    pub fn element(&self, i: usize, j: usize) -> Result<Complex> {
        if i == j && i > 0 {
            let sums = self.diagonal_sums(i)?;
            self.diagonal_from_sums(&sums)
        } else {
            self.off_diagonal(i, j)
        }
    }
}

/// Entry `(row, col)` of `F`; tables are the exponent 1/3 and 2/3 modes.
pub fn f_element(row: usize, col: usize, modes_a: &ModeTable, modes_b: &ModeTable, cfg: &SumConfig) -> Result<Complex> {
    FBuilder::new(modes_a.clone(), modes_b.clone(), *cfg)?.element(row, col)
}

/// Assembled `F` of order `N` (size `(N+1) × (N+1)`).
#[derive(Debug, Clone)]
pub struct FMatrix {
    n: usize,
    entries: DMatrix<Complex>,
    f00: f64,
    sum_cfg: Option<SumConfig>,
    diagonal: Vec<DiagonalSums>,
}

/// Structural defects of a candidate `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// `max |F_ij - conj F_ji|`
    pub hermiticity: f64,
    /// `max |C F C - conj F|`: imaginary parts on same-parity entries and
    /// real parts on mixed-parity entries.
    pub parity_reality: f64,
}

impl FMatrix {
    /// Wraps an arbitrary matrix (for example a perturbed or solved one).
    pub fn from_entries(entries: DMatrix<Complex>, sum_cfg: Option<SumConfig>) -> Result<FMatrix> {
        if entries.nrows() != entries.ncols() || entries.nrows() < 2 {
            return Err(Error::InvalidArgument("F must be square of size >= 2".into()));
        }
        Ok(FMatrix {
            n: entries.nrows() - 1,
            f00: entries[(0, 0)].re,
            entries,
            sum_cfg,
            diagonal: Vec::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &DMatrix<Complex> {
        &self.entries
    }

    pub fn f00(&self) -> f64 {
        self.f00
    }

    pub fn sum_cfg(&self) -> Option<&SumConfig> {
        self.sum_cfg.as_ref()
    }

    /// Sums behind the diagonal entries `1..=N`, when built from closed forms.
    pub fn diagonal_sums(&self) -> &[DiagonalSums] {
        &self.diagonal
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.entries[(i, j)]
    }

    pub fn structure(&self) -> StructureReport {
        let f = &self.entries;
        let mut herm = 0.0f64;
        let mut parity = 0.0f64;
        for i in 0..=self.n {
            for j in 0..=self.n {
                herm = herm.max((f[(i, j)] - f[(j, i)].conj()).norm());
                let z = f[(i, j)];
                let defect = if i % 2 == j % 2 { z.im.abs() } else { z.re.abs() };
                parity = parity.max(defect);
            }
        }
        StructureReport {
            hermiticity: herm,
            parity_reality: parity,
        }
    }

    /// `max |(F² - I)_ij|` over `i, j < window`.
    pub fn involution_residual(&self, window: usize) -> f64 {
        identity_deviation(&(&self.entries * &self.entries), window)
    }

    /// `F` with the single entry `(i, j)` shifted by `delta`.
    pub fn perturbed(&self, i: usize, j: usize, delta: Complex) -> Result<FMatrix> {
        if i > self.n || j > self.n {
            return Err(Error::InvalidArgument(format!("entry ({i},{j}) outside F of order {}", self.n)));
        }
        let mut entries = self.entries.clone();
        entries[(i, j)] += delta;
        Ok(FMatrix {
            n: self.n,
            f00: entries[(0, 0)].re,
            entries,
            sum_cfg: self.sum_cfg,
            diagonal: Vec::new(),
        })
    }
}

/// Assembles `F` of order `n ≥ 2`, then checks hermiticity and parity-reality.
pub fn f_assemble(n: usize, modes_a: &ModeTable, modes_b: &ModeTable, cfg: &SumConfig) -> Result<FMatrix> {
    let builder = FBuilder::new(modes_a.clone(), modes_b.clone(), *cfg)?;
    f_assemble_with(&builder, n)
}

pub fn f_assemble_with(builder: &FBuilder, n: usize) -> Result<FMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument("F needs order N >= 2".into()));
    }
    let diagonal = (1..=n).map(|i| builder.diagonal_sums(i)).collect::<Result<Vec<_>>>()?;
    let mut entries = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            entries[(i, j)] = if i == j && i > 0 {
                builder.diagonal_from_sums(&diagonal[i - 1])?
            } else {
                builder.off_diagonal(i, j)?
            };
        }
    }
    let f = FMatrix {
        n,
        f00: builder.f00,
        entries,
        sum_cfg: Some(builder.cfg),
        diagonal,
    };
    let s = f.structure();
    for (what, value) in [("hermiticity defect", s.hermiticity), ("parity-reality defect", s.parity_reality)] {
        if value > STRUCTURE_TOLERANCE {
            return Err(Error::Invariant {
                what: what.into(),
                value,
                tolerance: STRUCTURE_TOLERANCE,
            });
        }
    }
    Ok(f)
}

/// Residuals of the three overlap constraint families.
///
/// With `G1 = F + I`, `G2 = F - I`, and columns `k < window`:
///
/// ```text
/// R1[n,k] = G1[2n-1,k] - i√3 Σ_m (M1+M2)_{mn} G1[2m,k]
/// R2[n,k] = G2[2n-1,k] + (i/√3) Σ_m (M1-M2)_{mn} G2[2m,k] - (4i/(π√3)) (-1)^n (2n-1)^{-3/2} G2[0,k]
/// R3[k]   = G1[0,k] + Σ_m 2 (-1)^m / √(2m) G1[2m,k]
/// ```
///
/// for rows `n = 1..=window`, sums over every even index `2m ≤ N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub n: usize,
    pub window: usize,
    pub r1_max: f64,
    pub r2_max: f64,
    pub r3_max: f64,
    /// Per-row maxima over the window columns, rows `n = 1..=window`.
    pub r1_rows: Vec<f64>,
    pub r2_rows: Vec<f64>,
    /// Per-column values of the single midpoint row.
    pub r3_cols: Vec<f64>,
}

impl ConstraintReport {
    pub fn max(&self) -> f64 {
        self.r1_max.max(self.r2_max).max(self.r3_max)
    }
}

type ConstraintRows = (Vec<Vec<Complex>>, Vec<Vec<Complex>>, Vec<Complex>);

/// Coefficient rows of the constraints acting on a column of `G1` or `G2`.
///
/// Returns `(odd rows of the first family, odd rows of the second family,
/// midpoint row)`, each a vector over indices `0..=N`.
pub(crate) fn constraint_rows(n: usize, coupling: &CouplingMatrices) -> Result<ConstraintRows> {
    let odd = n.div_ceil(2);
    let even = n / 2;
    if coupling.order() < odd {
        return Err(Error::InvalidArgument(format!(
            "F of order {n} needs coupling of order >= {odd}, got {}",
            coupling.order()
        )));
    }
    let s3 = 3f64.sqrt();
    let mut first = Vec::with_capacity(odd);
    let mut second = Vec::with_capacity(odd);
    for row in 1..=odd {
        let mut c1 = vec![Complex::new(0.0, 0.0); n + 1];
        let mut c2 = c1.clone();
        c1[2 * row - 1] = Complex::new(1.0, 0.0);
        c2[2 * row - 1] = Complex::new(1.0, 0.0);
        for m in 1..=even {
            let plus = coupling.m1_at(m, row) + coupling.m2_at(m, row);
            let minus = coupling.m1_at(m, row) - coupling.m2_at(m, row);
            c1[2 * m] = Complex::new(0.0, -s3 * plus);
            c2[2 * m] = Complex::new(0.0, minus / s3);
        }
        let o = 2.0 * row as f64 - 1.0;
        c2[0] = Complex::new(0.0, -4.0 / (PI * s3) * sign(row) / o.powf(1.5));
        first.push(c1);
        second.push(c2);
    }
    let mut mid = vec![Complex::new(0.0, 0.0); n + 1];
    mid[0] = Complex::new(1.0, 0.0);
    for m in 1..=even {
        mid[2 * m] = Complex::new(2.0 * sign(m) / (2.0 * m as f64).sqrt(), 0.0);
    }
    Ok((first, second, mid))
}

/// Evaluates the constraint residuals of `f` over an interior window.
pub fn f_constraint_residual(f: &FMatrix, coupling: &CouplingMatrices, window: usize) -> Result<ConstraintReport> {
    let n = f.order();
    let (first, second, mid) = constraint_rows(n, coupling)?;
    let odd = first.len();
    let rows = window.min(odd);
    let cols = window.min(n + 1);
    let e = f.entries();
    let g = |sign_id: f64, i: usize, k: usize| e[(i, k)] + if i == k { Complex::new(sign_id, 0.0) } else { Complex::new(0.0, 0.0) };
    let apply = |coef: &[Complex], sign_id: f64, k: usize| {
        coef.iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .fold(Complex::new(0.0, 0.0), |acc, (i, c)| acc + c * g(sign_id, i, k))
            .norm()
    };
    let r1_rows: Vec<f64> = (0..rows)
        .map(|r| (0..cols).map(|k| apply(&first[r], 1.0, k)).fold(0.0, f64::max))
        .collect();
    let r2_rows: Vec<f64> = (0..rows)
        .map(|r| (0..cols).map(|k| apply(&second[r], -1.0, k)).fold(0.0, f64::max))
        .collect();
    let r3_cols: Vec<f64> = (0..cols).map(|k| apply(&mid, 1.0, k)).collect();
    let maxof = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(ConstraintReport {
        n,
        window,
        r1_max: maxof(&r1_rows),
        r2_max: maxof(&r2_rows),
        r3_max: maxof(&r3_cols),
        r1_rows,
        r2_rows,
        r3_cols,
    })
}

/// One midpoint relation: `lhs` against the extrapolated `rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointCheck {
    pub lhs: Complex,
    pub rhs: Complex,
    pub est_error: f64,
}

impl MidpointCheck {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// `F00 + 1 = 2 Σ_n (-1)^{n+1} / √(2n) F_{2n,0}`.
pub fn midpoint_f00(builder: &FBuilder) -> Result<MidpointCheck> {
    let cfg = *builder.cfg();
    builder.need(2 * cfg.sum_order)?;
    // summands are a multiple of a_{2n}/(2n)
    let ladder = Ladder::for_modes(1.0 / 3.0, 1, 8);
    let term = |j: usize| {
        let k = j + 1;
        let e = 2 * k;
        2.0 * sign(k + 1) / (e as f64).sqrt() * builder.off_diagonal(e, 0).map(|z| z.re).unwrap_or(f64::NAN)
    };
    let s = extrapolated_sum(term, &cfg, &ladder);
    Ok(MidpointCheck {
        lhs: Complex::new(builder.f00 + 1.0, 0.0),
        rhs: Complex::new(s.value, 0.0),
        est_error: s.est_error,
    })
}

/// `F_{0,2m} = 2(-1)^{m+1}/√(2m) + 2 Σ_k (-1)^{k+1}/√(2k) F_{2k,2m}` for even
/// `col = 2m`, and `F_{0,2m-1} = 2 Σ_k (-1)^{k+1}/√(2k) F_{2k,2m-1}` for odd `col`.
pub fn midpoint_column(builder: &FBuilder, col: usize) -> Result<MidpointCheck> {
    if col == 0 {
        return Err(Error::InvalidArgument("use midpoint_f00 for column 0".into()));
    }
    let cfg = *builder.cfg();
    builder.need((2 * cfg.sum_order).max(col))?;
    let diag = if col.is_multiple_of(2) {
        Some(builder.element(col, col)?)
    } else {
        None
    };
    let ladder = Ladder::fractional(3, 16);
    let part = |re: bool| {
        let term = |j: usize| {
            let k = j + 1;
            let e = 2 * k;
            let z = if e == col {
                diag.unwrap()
            } else {
                builder.off_diagonal(e, col).unwrap_or(Complex::new(f64::NAN, f64::NAN))
            };
            let w = 2.0 * sign(k + 1) / (e as f64).sqrt();
            w * if re { z.re } else { z.im }
        };
        extrapolated_sum(term, &cfg, &ladder)
    };
    let (sr, si) = (part(true), part(false));
    let mut rhs = Complex::new(sr.value, si.value);
    if col.is_multiple_of(2) {
        rhs += 2.0 * sign(col / 2 + 1) / (col as f64).sqrt();
    }
    Ok(MidpointCheck {
        lhs: builder.off_diagonal(0, col)?,
        rhs,
        est_error: sr.est_error.hypot(si.est_error),
    })
}

/// `max |F_ij|` over the window, for quick comparisons.
pub fn window_max_abs(m: &DMatrix<Complex>, window: usize) -> f64 {
    block_max_abs(m, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_coupling;
    use crate::extrapolate::Extrapolation;
    use crate::modes::generate_modes;
    use approx::assert_abs_diff_eq;

    fn builder(sum_order: usize) -> FBuilder {
        let cfg = SumConfig::new(sum_order, Extrapolation::Richardson { levels: 2 }, 1e-6).unwrap();
        let l = 2 * sum_order;
        FBuilder::new(
            generate_modes(ExponentPair::new(3, 1).unwrap(), l),
            generate_modes(ExponentPair::new(3, 2).unwrap(), l),
            cfg,
        )
        .unwrap()
    }

    #[test]
    fn f00_closed_form() {
        let f = f00();
        assert_abs_diff_eq!(f, -0.3129837106, epsilon = 1e-9);
        assert!(((1.0 + f) / (1.0 - f) - 27f64.ln() + 16f64.ln()).abs() <= 1e-14);
    }

    #[test]
    fn spot_entries() {
        let b = builder(1024);
        assert_abs_diff_eq!(b.element(2, 0).unwrap().re, 0.2063154856, epsilon = 1e-9);
        assert_abs_diff_eq!(b.element(0, 2).unwrap().re, 0.2063154856, epsilon = 1e-9);
        let z = b.element(0, 1).unwrap();
        assert_abs_diff_eq!(z.re, 0.0);
        assert_abs_diff_eq!(z.im, -0.8753224737, epsilon = 1e-9);
        assert_eq!(b.element(1, 0).unwrap(), z.conj());
    }

    #[test]
    fn c_squares_to_identity() {
        let c = CMatrix::new(9).to_real();
        assert_eq!(&c * &c, DMatrix::identity(10, 10));
    }

    #[test]
    fn small_assembly_is_structured() {
        let b = builder(1024);
        let f = f_assemble_with(&b, 16).unwrap();
        let s = f.structure();
        assert!(s.hermiticity <= 1e-12 && s.parity_reality <= 1e-12);
        assert_eq!(f.diagonal_sums().len(), 16);
        assert!(f_assemble_with(&b, 1).is_err());
    }

    #[test]
    fn identity_input_violates_constraints() {
        let c = build_coupling(8).unwrap();
        let id = FMatrix::from_entries(DMatrix::identity(17, 17), None).unwrap();
        let r = f_constraint_residual(&id, &c, 8).unwrap();
        assert!(r.max() > 0.5);
    }

    #[test]
    fn midpoint_zero_row() {
        let b = builder(4096);
        let m = midpoint_f00(&b).unwrap();
        assert!(m.residual() < 1e-6, "{m:?}");
    }

    #[test]
    fn rejects_wrong_tables() {
        let cfg = SumConfig::default();
        let a = generate_modes(ExponentPair::new(4, 1).unwrap(), 10);
        let b = generate_modes(ExponentPair::new(4, 3).unwrap(), 10);
        assert!(FBuilder::new(a, b, cfg).is_err());
    }
}
