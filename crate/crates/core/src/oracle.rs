//! Least-squares solution of the overlap constraints, independent of the
//! closed-form entries.
//!
//! Every constraint row acts on one column of `F ± I`, so column `k` of `F`
//! solves `A x = b_k` with a shared complex `A`. Rows are scaled to unit norm,
//! then split into real and imaginary parts:
//!
//! ```text
//! [Re A  -Im A] [Re x]   [Re b]
//! [Im A   Re A] [Im x] = [Im b]
//! ```
//!
//! No symmetry of `F` is assumed, so the hermiticity of the solution is a
//! genuine check.

use nalgebra::{DMatrix, SVD};
use serde::{Deserialize, Serialize};

use crate::basis::CouplingMatrices;
use crate::error::{Error, Result};
use crate::fmatrix::{constraint_rows, FMatrix};
use crate::Complex;

/// Largest order accepted for the dense solve.
pub const MAX_ORACLE_ORDER: usize = 128;

/// Singular values below `RANK_TOLERANCE · σ_max` count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub f: FMatrix,
    /// Rank of the real system; full rank is `2(N+1)`.
    pub rank: usize,
    pub condition: f64,
    /// `max |F_ij - conj F_ji|` of the solution.
    pub hermiticity_defect: f64,
}

/// Summary of an oracle run against a reference matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub n: usize,
    pub window: usize,
    pub max_abs_diff: f64,
    pub f00: f64,
    pub rank: usize,
    pub condition: f64,
    pub hermiticity_defect: f64,
}

/// Solves for `F` of order `n` from the constraints alone.
pub fn f_oracle_solve(n: usize, coupling: &CouplingMatrices) -> Result<OracleSolution> {
    if !(2..=MAX_ORACLE_ORDER).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "oracle order must lie in 2..={MAX_ORACLE_ORDER}, got {n}"
        )));
    }
    let (first, second, mid) = constraint_rows(n, coupling)?;
    let dim = n + 1;
    // (coefficients, sign of the identity shift: +1 for F + I, -1 for F - I)
    let mut rows: Vec<(Vec<Complex>, f64)> = Vec::with_capacity(first.len() + second.len() + 1);
    rows.extend(first.into_iter().map(|r| (r, 1.0)));
    rows.extend(second.into_iter().map(|r| (r, -1.0)));
    rows.push((mid, 1.0));
    for (r, _) in rows.iter_mut() {
        let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        r.iter_mut().for_each(|z| *z /= norm);
    }
    let eqs = rows.len();
    if 2 * eqs < 2 * dim {
        return Err(Error::RankDeficient { null_dim: 2 * (dim - eqs) });
    }

    let mut a = DMatrix::<f64>::zeros(2 * eqs, 2 * dim);
    for (i, (r, _)) in rows.iter().enumerate() {
        for (j, z) in r.iter().enumerate() {
            a[(i, j)] = z.re;
            a[(i, j + dim)] = -z.im;
            a[(i + eqs, j)] = z.im;
            a[(i + eqs, j + dim)] = z.re;
        }
    }
    // A (F ± I) e_k = 0  =>  A F e_k = ∓ A e_k
    let mut b = DMatrix::<f64>::zeros(2 * eqs, dim);
    for (i, (r, shift)) in rows.iter().enumerate() {
        for (k, z) in r.iter().enumerate() {
            b[(i, k)] = -shift * z.re;
            b[(i + eqs, k)] = -shift * z.im;
        }
    }

    let svd = SVD::new(a, true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let rank = sv.iter().filter(|&&s| s > RANK_TOLERANCE * smax).count();
    if rank < 2 * dim {
        return Err(Error::RankDeficient { null_dim: 2 * dim - rank });
    }
    let condition = smax / sv.min();
    let x = svd.solve(&b, RANK_TOLERANCE * smax).map_err(|_| Error::Singular)?;

    let entries = DMatrix::from_fn(dim, dim, |i, k| Complex::new(x[(i, k)], x[(i + dim, k)]));
    let f = FMatrix::from_entries(entries, None)?;
    let hermiticity_defect = f.structure().hermiticity;
    Ok(OracleSolution {
        f,
        rank,
        condition,
        hermiticity_defect,
    })
}

/// Compares an oracle solution with `reference` on the leading window.
pub fn compare(sol: &OracleSolution, reference: &FMatrix, window: usize) -> Result<OracleComparison> {
    let n = sol.f.order();
    if reference.order() != n {
        return Err(Error::InvalidArgument(format!(
            "oracle order {n} differs from reference order {}",
            reference.order()
        )));
    }
    let w = window.min(n + 1);
    let mut diff = 0.0f64;
    for i in 0..w {
        for j in 0..w {
            diff = diff.max((sol.f.get(i, j) - reference.get(i, j)).norm());
        }
    }
    Ok(OracleComparison {
        n,
        window: w,
        max_abs_diff: diff,
        f00: sol.f.get(0, 0).re,
        rank: sol.rank,
        condition: sol.condition,
        hermiticity_defect: sol.hermiticity_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_coupling;
    use crate::fmatrix::f_constraint_residual;

    #[test]
    fn solution_satisfies_its_constraints() {
        let n = 16;
        let c = build_coupling(n / 2).unwrap();
        let sol = f_oracle_solve(n, &c).unwrap();
        assert_eq!(sol.rank, 2 * (n + 1));
        let r = f_constraint_residual(&sol.f, &c, n).unwrap();
        assert!(r.max() < 1e-9, "{r:?}");
    }

    #[test]
    fn order_limits() {
        let c = build_coupling(100).unwrap();
        assert!(f_oracle_solve(1, &c).is_err());
        assert!(f_oracle_solve(129, &c).is_err());
    }
}
