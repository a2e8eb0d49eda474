//! Residual-versus-truncation tables.

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Residual measured at one truncation order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub residual: f64,
    /// Observed order `log(r_prev / r) / log(n / n_prev)`; absent on the first row.
    pub est_order: Option<f64>,
}

/// Evaluates `residual` at each order in `orders`, which must increase strictly.
pub fn convergence_table(
    orders: &[usize],
    mut residual: impl FnMut(usize) -> Result<f64>,
) -> Result<Vec<ConvergencePoint>> {
    if orders.windows(2).any(|w| w[1] <= w[0]) {
        return Err(crate::Error::InvalidArgument(
            "truncation orders must be strictly increasing".into(),
        ));
    }
    let mut out: Vec<ConvergencePoint> = Vec::with_capacity(orders.len());
    for &n in orders {
        let r = residual(n)?;
        let est_order = out.last().map(|prev| {
            (prev.residual / r).ln() / (n as f64 / prev.n as f64).ln()
        });
        out.push(ConvergencePoint {
            n,
            residual: r,
            est_order,
        });
    }
    Ok(out)
}

/// True when every residual is strictly below the one before it.
pub fn strictly_decreasing(points: &[ConvergencePoint]) -> bool {
    points.windows(2).all(|w| w[1].residual < w[0].residual)
}
