use std::f64::consts::PI;

use vertexkit::extrapolate::{Extrapolation, SumConfig};
use vertexkit::modes::{generate_modes, ExponentPair, ModeTable};
use vertexkit::sums::{identity_us, o_closed_form, sum_o, w_recursion_residual, Sign};

fn tables(p: u32, order: usize) -> (ModeTable, ModeTable) {
    (
        generate_modes(ExponentPair::lower(p).unwrap(), order),
        generate_modes(ExponentPair::upper(p).unwrap(), order),
    )
}

fn cfg() -> SumConfig {
    SumConfig::new(4096, Extrapolation::Richardson { levels: 3 }, 1e-6).unwrap()
}

#[test]
fn us_identity_up_to_fifty() {
    let c = cfg();
    for p in [3, 4] {
        let (a, b) = tables(p, 2 * c.sum_order + 128);
        for n in 1..=50 {
            let v = identity_us(n, &a, &b, &c).unwrap();
            let err = (v.value - 1.0 / n as f64).abs();
            assert!(err <= c.tolerance, "p={p} n={n}: error {err:e}, est {:e}", v.est_error);
        }
    }
}

#[test]
fn o_closed_form_within_estimate() {
    let c = cfg();
    let (a, b) = tables(3, 2 * c.sum_order + 64);
    for modes in [&a, &b] {
        for n in (2..=20).step_by(2) {
            let v = sum_o(Sign::Plus, n, modes, &c).unwrap();
            let exact = o_closed_form(n, modes).unwrap();
            assert!(
                (v.value - exact).abs() <= v.est_error,
                "q={} n={n}: {} vs {exact}, est {:e}",
                modes.exponents().q(),
                v.value,
                v.est_error
            );
        }
    }
}

#[test]
fn o_reflection_within_estimate() {
    let c = cfg();
    let (a, b) = tables(3, 2 * c.sum_order + 64);
    for modes in [&a, &b] {
        let factor = -(modes.exponents().exponent() * PI).cos();
        for n in (2..=20).step_by(2) {
            let plus = sum_o(Sign::Plus, n, modes, &c).unwrap();
            let minus = sum_o(Sign::Minus, n, modes, &c).unwrap();
            let bound = minus.est_error + factor.abs() * plus.est_error;
            assert!(
                (minus.value - factor * plus.value).abs() <= bound,
                "q={} n={n}: {} vs {}",
                modes.exponents().q(),
                minus.value,
                factor * plus.value
            );
        }
    }
}

#[test]
fn w_recursion_sampled() {
    for p in [3, 4, 6] {
        let (a, b) = tables(p, 502);
        for n in (1..=500).step_by(37) {
            for m in (1..=500).step_by(41) {
                if (n + m) % 2 == 1 {
                    let r = w_recursion_residual(n, m, &a, &b).unwrap();
                    assert!(r.abs() <= 1e-12, "p={p} ({n},{m}): {r:e}");
                }
            }
        }
    }
}
