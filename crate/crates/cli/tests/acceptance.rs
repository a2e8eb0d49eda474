//! One PASS/FAIL line per acceptance criterion; the test fails if any line fails.

use std::io::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use vertexkit::basis::{build_coupling, MIdentity};
use vertexkit::extrapolate::{Extrapolation, SumConfig};
use vertexkit::fmatrix::{f00, f_assemble_with, log_27_16, CMatrix, FBuilder};
use vertexkit::inverse::{ansatz_inverse, inverse_residuals, numeric_inverse, solve_params, InverseRoute};
use vertexkit::modes::{generate_modes, generate_modes_oracle, ExponentPair, ModeTable};
use vertexkit::oracle::{compare, f_oracle_solve};
use vertexkit::sums::{identity_us, log_series, o_closed_form, sum_o, w_recursion_residual, Sign};
use vertexkit::vertex::{momentum_rep, NeumannFamily};

const F00_LOG_TOL: f64 = 1e-14;
const LOG_RAW_TOL: f64 = 1e-2;
const LOG_RICHARDSON_TOL: f64 = 1e-5;
const AC1_BUDGET: Duration = Duration::from_secs(1);

const TAYLOR_MAX_K: usize = 2000;
const TAYLOR_REL_TOL: f64 = 1e-12;
const AC2_BUDGET: Duration = Duration::from_secs(5);

const M_IDENTITY_TOL: f64 = 5e-2;
const AC3_BUDGET: Duration = Duration::from_secs(30);

const INVERSE_TOL: f64 = 5e-2;
const DENSE_BLOCK: usize = 16;
const DENSE_BLOCK_TOL: f64 = 1e-2;

const STRUCTURE_TOL: f64 = 1e-12;
const INVOLUTION_WINDOW: usize = 16;

const ORACLE_ORDER: usize = 64;
const ORACLE_WINDOW: usize = 8;
const ORACLE_DIFF_TOL: f64 = 5e-2;
const ORACLE_F00_QUOTED: f64 = -0.312987;
const ORACLE_F00_TOL: f64 = 2e-2;

const US_MAX: usize = 50;
const O_MAX: usize = 20;
const W_MAX: usize = 500;
const W_TOL: f64 = 1e-12;

const VERTEX_TOL: f64 = 1e-12;

const ORDERS: [usize; 3] = [128, 256, 512];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn p3_pair(length: usize) -> (ModeTable, ModeTable) {
    (
        generate_modes(ExponentPair::lower(3).unwrap(), length),
        generate_modes(ExponentPair::upper(3).unwrap(), length),
    )
}

fn builder(n: usize) -> FBuilder {
    let cfg = SumConfig::default();
    let (a, b) = p3_pair(FBuilder::modes_needed(n, &cfg));
    FBuilder::new(a, b, cfg).unwrap()
}

fn ac1() -> Outcome {
    let t = Instant::now();
    let f = f00();
    let closed = ((1.0 + f) / (1.0 - f) - log_27_16()).abs();
    let target = 1.5 * 3f64.ln() - 2.0 * 2f64.ln();
    let (a, _) = p3_pair(4096);
    let raw = log_series(&a, &SumConfig::new(2048, Extrapolation::None, LOG_RAW_TOL).unwrap()).unwrap();
    let rich =
        log_series(&a, &SumConfig::new(2048, Extrapolation::Richardson { levels: 1 }, LOG_RICHARDSON_TOL).unwrap())
            .unwrap();
    let raw_err = (raw.value - target).abs();
    let rich_err = (rich.value - target).abs();
    let elapsed = t.elapsed();
    outcome(
        closed <= F00_LOG_TOL && raw_err <= LOG_RAW_TOL && rich_err <= LOG_RICHARDSON_TOL && elapsed < AC1_BUDGET,
        format!(
            "closed form {closed:.2e} (tol {F00_LOG_TOL:.0e}); series raw {raw_err:.2e} (tol {LOG_RAW_TOL:.0e}), \
             richardson1 {rich_err:.2e} (tol {LOG_RICHARDSON_TOL:.0e}); {elapsed:.2?}"
        ),
    )
}

fn ac2() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for p in [2, 3, 4, 6] {
        for e in [ExponentPair::lower(p).unwrap(), ExponentPair::upper(p).unwrap()] {
            let fast = generate_modes(e, TAYLOR_MAX_K);
            let slow = generate_modes_oracle(e, TAYLOR_MAX_K);
            for k in 0..=TAYLOR_MAX_K {
                let rel = (fast[k] - slow[k]).abs() / slow[k].abs();
                worst = worst.max(rel);
            }
        }
    }
    let elapsed = t.elapsed();
    outcome(
        worst <= TAYLOR_REL_TOL && elapsed < AC2_BUDGET,
        format!("max relative difference {worst:.2e} (tol {TAYLOR_REL_TOL:.0e}); {elapsed:.2?}"),
    )
}

fn ac3() -> Outcome {
    let t = Instant::now();
    let couplings: Vec<_> = ORDERS.iter().map(|&n| build_coupling(n).unwrap()).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for id in MIdentity::ALL {
        let r: Vec<f64> = couplings.iter().zip(ORDERS).map(|(c, n)| id.residual(c, n / 8)).collect();
        pass &= decreasing(&r) && r[2] <= M_IDENTITY_TOL;
        parts.push(format!("{} {:.2e}", id.name(), r[2]));
    }
    let elapsed = t.elapsed();
    pass &= elapsed < AC3_BUDGET;
    outcome(pass, format!("at N=512: {} (tol {M_IDENTITY_TOL:.0e}); {elapsed:.2?}", parts.join(", ")))
}

fn ac4() -> Outcome {
    let InverseRoute::Ansatz(params) = solve_params(0.5, 1.0).unwrap() else {
        return outcome(false, "alpha = 1/2 did not take the ansatz route".into());
    };
    let (a, b) = p3_pair(2 * 1024);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for n in ORDERS {
        let inv = ansatz_inverse(&params, &a, &b, n).unwrap();
        let r = inverse_residuals(&inv, 0.5, 1.0, &build_coupling(n).unwrap(), n / 16).unwrap();
        left.push(r.left);
        right.push(r.right);
    }
    let c = build_coupling(1024).unwrap();
    let inv = ansatz_inverse(&params, &a, &b, 1024).unwrap();
    let dense = numeric_inverse(0.5, 1.0, &c).unwrap();
    let block = (inv.entries().view((0, 0), (DENSE_BLOCK, DENSE_BLOCK))
        - dense.entries().view((0, 0), (DENSE_BLOCK, DENSE_BLOCK)))
    .amax();
    outcome(
        decreasing(&left)
            && decreasing(&right)
            && left[2] <= INVERSE_TOL
            && right[2] <= INVERSE_TOL
            && block <= DENSE_BLOCK_TOL,
        format!(
            "left {}, right {} (tol {INVERSE_TOL:.0e}); \
             16x16 block vs dense at N=1024 {block:.2e} (tol {DENSE_BLOCK_TOL:.0e})",
            sci(&left),
            sci(&right)
        ),
    )
}

fn ac5(b: &FBuilder) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [64, 256] {
        let s = f_assemble_with(b, n).unwrap().structure();
        pass &= s.hermiticity <= STRUCTURE_TOL && s.parity_reality <= STRUCTURE_TOL;
        parts.push(format!("N={n} hermiticity {:.1e}, parity {:.1e}", s.hermiticity, s.parity_reality));
    }
    let inv: Vec<f64> = ORDERS
        .iter()
        .map(|&n| f_assemble_with(b, n).unwrap().involution_residual(INVOLUTION_WINDOW))
        .collect();
    pass &= decreasing(&inv);
    outcome(
        pass,
        format!("{} (tol {STRUCTURE_TOL:.0e}); F^2-I window {INVOLUTION_WINDOW}: {}", parts.join("; "), sci(&inv)),
    )
}

fn ac6(b: &FBuilder) -> Outcome {
    let sol = f_oracle_solve(ORACLE_ORDER, &build_coupling(ORACLE_ORDER / 2).unwrap()).unwrap();
    let cmp = compare(&sol, &f_assemble_with(b, ORACLE_ORDER).unwrap(), ORACLE_WINDOW).unwrap();
    let f00_err = (cmp.f00 - ORACLE_F00_QUOTED).abs();
    outcome(
        cmp.max_abs_diff <= ORACLE_DIFF_TOL && f00_err <= ORACLE_F00_TOL,
        format!(
            "window {ORACLE_WINDOW} diff {:.2e} (tol {ORACLE_DIFF_TOL:.0e}); oracle F00 {:.6} off by {f00_err:.2e} \
             (tol {ORACLE_F00_TOL:.0e}); rank {}",
            cmp.max_abs_diff, cmp.f00, cmp.rank
        ),
    )
}

fn ac7() -> Outcome {
    let cfg = SumConfig::new(4096, Extrapolation::Richardson { levels: 3 }, 1e-6).unwrap();
    let (a, b) = p3_pair(2 * cfg.sum_order + 2 * O_MAX);
    let us = (1..=US_MAX)
        .map(|n| (identity_us(n, &a, &b, &cfg).unwrap().value - 1.0 / n as f64).abs())
        .fold(0.0, f64::max);
    let mut o_ok = true;
    let mut o_margin: f64 = 0.0;
    for modes in [&a, &b] {
        let factor = -(modes.exponents().exponent() * std::f64::consts::PI).cos();
        for n in (2..=O_MAX).step_by(2) {
            let plus = sum_o(Sign::Plus, n, modes, &cfg).unwrap();
            let minus = sum_o(Sign::Minus, n, modes, &cfg).unwrap();
            let closed = (plus.value - o_closed_form(n, modes).unwrap()).abs();
            let refl = (minus.value - factor * plus.value).abs();
            let refl_bound = minus.est_error + factor.abs() * plus.est_error;
            o_ok &= closed <= plus.est_error && refl <= refl_bound;
            o_margin = o_margin.max(closed / plus.est_error).max(refl / refl_bound);
        }
    }
    let mut w: f64 = 0.0;
    for n in 1..=W_MAX {
        for m in [1, n % 97 + 2, W_MAX + 1 - n] {
            if (n + m) % 2 == 1 {
                w = w.max(w_recursion_residual(n, m, &a, &b).unwrap().abs());
            }
        }
    }
    outcome(
        us <= cfg.tolerance && o_ok && w <= W_TOL,
        format!(
            "uS max {us:.2e} (tol {:.0e}); O worst error/est_error {o_margin:.2}; W recursion {w:.2e} (tol {W_TOL:.0e})",
            cfg.tolerance
        ),
    )
}

fn ac8(b: &FBuilder) -> Outcome {
    let n = 128;
    let f = f_assemble_with(b, n).unwrap();
    let c = CMatrix::new(n);
    // reality is enforced inside build: a complex residue is an error
    let family = NeumannFamily::build(&f, &c);
    let Ok(family) = family else {
        return outcome(false, format!("family build failed: {:?}", family.err()));
    };
    let r = family.report(&c);
    let primed: Vec<f64> = ORDERS
        .iter()
        .map(|&n| momentum_rep(&f_assemble_with(b, n).unwrap()).unwrap().involution_residual(INVOLUTION_WINDOW))
        .collect();
    outcome(
        r.max() <= VERTEX_TOL && decreasing(&primed),
        format!(
            "N=128 row sum {:.1e}, cyclicity {:.1e}, exchange {:.1e} (tol {VERTEX_TOL:.0e}); primed involution {}",
            r.row_sum,
            r.cyclicity,
            r.exchange,
            sci(&primed)
        ),
    )
}

fn vertexkit(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_vertexkit"))
        .args(args)
        .env_remove("VERTEXKIT_CACHE")
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

fn ac9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    let runs: [&[&str]; 3] = [
        &["fmatrix", "--N", "32", "--window", "8"],
        &["vertex", "--part", "neumann", "--N", "16", "--window", "4"],
        &["verify", "--suite", "f-properties", "--N", "64"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let files: Vec<_> = (0..2).map(|k| dir.path().join(format!("run{i}_{k}.json"))).collect();
        for f in &files {
            let mut a = args.to_vec();
            a.extend(["--out", f.to_str().unwrap()]);
            let (code, _) = vertexkit(&a);
            pass &= code == 0;
        }
        let same = read(&files[0]) == read(&files[1]);
        pass &= same;
        parts.push(format!("{} {}", args[0], if same { "identical" } else { "differs" }));
    }
    let f = dir.path().join("f.json");
    let (code, _) = vertexkit(&["fmatrix", "--N", "16", "--window", "4", "--out", f.to_str().unwrap()]);
    pass &= code == 0;
    let input = f.to_str().unwrap();
    let (clean, _) = vertexkit(&["verify", "--input", input, "--suite", "f-properties", "--window", "4"]);
    pass &= clean == 0;
    let mut codes = Vec::new();
    for seed in 0..8 {
        let s = seed.to_string();
        let (code, _) =
            vertexkit(&["verify", "--input", input, "--suite", "f-properties", "--window", "4", "--perturb", &s]);
        codes.push(code);
    }
    pass &= codes.iter().all(|&c| c == 2);
    outcome(
        pass,
        format!("{}; unperturbed verify exit {clean}; perturbed seeds 0..8 exit {codes:?}", parts.join(", ")),
    )
}

#[test]
fn acceptance() {
    let b = builder(512);
    let results = [
        ("AC1 F00 closed form and log series", ac1()),
        ("AC2 Taylor recursion vs binomial oracle", ac2()),
        ("AC3 M identities", ac3()),
        ("AC4 p=3 ansatz inverse", ac4()),
        ("AC5 F structure and involution", ac5(&b)),
        ("AC6 constraint oracle", ac6(&b)),
        ("AC7 summation identities", ac7()),
        ("AC8 vertex family and primed involution", ac8(&b)),
        ("AC9 determinism and exit codes", ac9()),
    ];
    // written to the raw handle so the lines survive libtest output capture
    let mut err = std::io::stderr().lock();
    for (name, o) in &results {
        writeln!(err, "{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail).unwrap();
    }
    let failed: Vec<_> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}
