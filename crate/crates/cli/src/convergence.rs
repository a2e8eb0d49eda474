//! The `convergence` command: residual tables across truncation orders.

use std::fmt::Write as _;

use anyhow::bail;
use clap::ValueEnum;
use serde::Serialize;

use vertexkit::basis::{build_coupling, BasisKind, BasisMap, MIdentity};
use vertexkit::convergence::{convergence_table, strictly_decreasing, ConvergencePoint};
use vertexkit::export::sci17;
use vertexkit::extrapolate::SumConfig;
use vertexkit::fmatrix::{f_assemble_with, f_constraint_residual, FBuilder};
use vertexkit::inverse::{ansatz_inverse, inverse_residuals, solve_params, InverseRoute};
use vertexkit::oracle::{compare, f_oracle_solve};
use vertexkit::vertex::momentum_rep;

use crate::context::Ctx;
use crate::report::{emit, to_json, Tolerances, SCHEMA_VERSION};
use crate::{Common, Format, Outcome};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// The four M1/M2 identities, window N/8.
    MCommutators,
    /// Coordinate and momentum basis round trips, fixed window.
    RoundTrip,
    /// Left and right residuals of the p = 3 ansatz inverse, window N/16.
    Inverse,
    /// F² - I, fixed window.
    Involution,
    /// The three constraint families on the closed-form F, fixed window.
    Constraints,
    /// F'F' - I on indices ≥ 1, fixed window.
    PrimedInvolution,
    /// Oracle against closed form on the leading 8×8 block.
    Oracle,
}

impl Identity {
    fn name(&self) -> &'static str {
        match self {
            Identity::MCommutators => "m_commutators",
            Identity::RoundTrip => "round_trip",
            Identity::Inverse => "inverse",
            Identity::Involution => "involution",
            Identity::Constraints => "constraints",
            Identity::PrimedInvolution => "primed_involution",
            Identity::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Serialize)]
struct Row {
    name: String,
    window: String,
    points: Vec<ConvergencePoint>,
    strictly_decreasing: bool,
}

#[derive(Serialize)]
struct Settings<'a> {
    orders: &'a [usize],
    sum_cfg: SumConfig,
    window: usize,
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    command: &'a str,
    identity: &'a str,
    config: Settings<'a>,
    tolerances: &'a Tolerances,
    rows: &'a [Row],
    pass: bool,
}

fn row(name: impl Into<String>, window: impl Into<String>, points: Vec<ConvergencePoint>) -> Row {
    Row {
        name: name.into(),
        window: window.into(),
        strictly_decreasing: strictly_decreasing(&points),
        points,
    }
}

pub fn run(c: &Common, identity: Identity) -> anyhow::Result<Outcome> {
    let orders = c.n.clone();
    if orders.len() < 2 {
        bail!("convergence needs at least two orders, e.g. --N 128,256,512");
    }
    // every order must satisfy the run constraints; the largest supplies the tables
    let mut ctx = None;
    for &n in &orders {
        ctx = Some(Ctx::new(c, n)?);
    }
    let ctx = ctx.expect("at least two orders");
    let nmax = *orders.iter().max().expect("nonempty");
    let w = c.window;
    let fixed = format!("{w}");

    let rows: Vec<Row> = match identity {
        Identity::MCommutators => {
            let couplings = orders.iter().map(|&n| build_coupling(n)).collect::<Result<Vec<_>, _>>()?;
            let mut rows = Vec::new();
            for id in MIdentity::ALL {
                let points = convergence_table(&orders, |n| {
                    let cp = &couplings[orders.iter().position(|&m| m == n).expect("listed order")];
                    Ok(id.residual(cp, n / 8))
                })?;
                rows.push(row(id.name(), "N/8", points));
            }
            rows
        }
        Identity::RoundTrip => {
            let mut rows = Vec::new();
            for (fwd, name) in [(BasisKind::CoordFullToHalf, "coordinate"), (BasisKind::MomFullToHalf, "momentum")] {
                let points = convergence_table(&orders, |n| {
                    let a = BasisMap::new(fwd, n)?;
                    let b = BasisMap::new(fwd.inverse(), n)?;
                    a.round_trip_residual(&b, w)
                })?;
                rows.push(row(name, fixed.clone(), points));
            }
            rows
        }
        Identity::Inverse => {
            let InverseRoute::Ansatz(params) = solve_params(0.5, 1.0)? else {
                unreachable!("alpha = 1/2, beta = 1 is the generic p = 3 case")
            };
            let (a, b) = ctx.pair(3, 2 * nmax)?;
            let mut left = Vec::new();
            let mut right = Vec::new();
            for &n in &orders {
                let inv = ansatz_inverse(&params, &a, &b, n)?;
                let r = inverse_residuals(&inv, 0.5, 1.0, &build_coupling(n)?, n / 16)?;
                left.push(r.left);
                right.push(r.right);
            }
            let pick = |v: &[f64]| {
                convergence_table(&orders, |n| Ok(v[orders.iter().position(|&m| m == n).expect("listed order")]))
            };
            vec![row("left", "N/16", pick(&left)?), row("right", "N/16", pick(&right)?)]
        }
        Identity::Involution | Identity::Constraints | Identity::PrimedInvolution => {
            let builder = ctx.fbuilder(nmax)?;
            let fs = orders
                .iter()
                .map(|&n| f_assemble_with(&builder, n))
                .collect::<Result<Vec<_>, _>>()?;
            let at = |n: usize| &fs[orders.iter().position(|&m| m == n).expect("listed order")];
            match identity {
                Identity::Involution => {
                    vec![row("f_squared", fixed.clone(), convergence_table(&orders, |n| Ok(at(n).involution_residual(w)))?)]
                }
                Identity::PrimedInvolution => vec![row(
                    "f_prime_squared",
                    fixed.clone(),
                    convergence_table(&orders, |n| Ok(momentum_rep(at(n))?.involution_residual(w)))?,
                )],
                _ => {
                    let reports = orders
                        .iter()
                        .map(|&n| f_constraint_residual(at(n), &build_coupling(n.div_ceil(2))?, w))
                        .collect::<Result<Vec<_>, _>>()?;
                    let idx = |n: usize| orders.iter().position(|&m| m == n).expect("listed order");
                    vec![
                        row("first_family", fixed.clone(), convergence_table(&orders, |n| Ok(reports[idx(n)].r1_max))?),
                        row("second_family", fixed.clone(), convergence_table(&orders, |n| Ok(reports[idx(n)].r2_max))?),
                        row("midpoint_row", fixed.clone(), convergence_table(&orders, |n| Ok(reports[idx(n)].r3_max))?),
                    ]
                }
            }
        }
        Identity::Oracle => {
            let builder: FBuilder = ctx.fbuilder(nmax)?;
            let points = convergence_table(&orders, |n| {
                let sol = f_oracle_solve(n, &build_coupling(n.div_ceil(2))?)?;
                Ok(compare(&sol, &f_assemble_with(&builder, n)?, 8)?.max_abs_diff)
            })?;
            vec![row("closed_form_diff", "8", points)]
        }
    };

    let pass = rows.iter().all(|r| r.strictly_decreasing);
    let mut summary = String::new();
    for r in &rows {
        let pts: Vec<String> = r.points.iter().map(|p| format!("N={} {:.3e}", p.n, p.residual)).collect();
        let _ = writeln!(
            summary,
            "{} {:<24} {}",
            if r.strictly_decreasing { "ok  " } else { "FAIL" },
            r.name,
            pts.join(", ")
        );
    }
    eprint!("{summary}");
    let text = match c.format {
        Format::Csv => {
            let mut s = String::from("identity,row,window,N,residual,est_order\n");
            for r in &rows {
                for p in &r.points {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        identity.name(),
                        r.name,
                        r.window,
                        p.n,
                        sci17(p.residual),
                        p.est_order.map(sci17).unwrap_or_default()
                    );
                }
            }
            s
        }
        Format::Json => to_json(&Report {
            schema_version: SCHEMA_VERSION,
            command: "convergence",
            identity: identity.name(),
            config: Settings {
                orders: &orders,
                sum_cfg: ctx.run.sum_cfg,
                window: w,
            },
            tolerances: &ctx.tol,
            rows: &rows,
            pass,
        })?,
    };
    emit(c.out.as_deref(), &text)?;
    Ok(if pass { Outcome::Pass } else { Outcome::Violation })
}
