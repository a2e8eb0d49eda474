mod common;

use vertexkit::basis::build_coupling;
use vertexkit::inverse::{ansatz_inverse, inverse_residuals, numeric_inverse, solve_params, InverseRoute};

use common::{p3_tables, strictly_decreasing};

fn p3() -> vertexkit::inverse::InverseParams {
    match solve_params(0.5, 1.0).unwrap() {
        InverseRoute::Ansatz(p) => p,
        other => panic!("{other:?}"),
    }
}

#[test]
fn left_and_right_residuals_converge() {
    let (a, b) = p3_tables();
    let params = p3();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for n in [128, 256, 512] {
        let c = build_coupling(n).unwrap();
        let inv = ansatz_inverse(&params, a, b, n).unwrap();
        let r = inverse_residuals(&inv, 0.5, 1.0, &c, n / 16).unwrap();
        left.push(r.left);
        right.push(r.right);
    }
    assert!(strictly_decreasing(&left), "{left:?}");
    assert!(strictly_decreasing(&right), "{right:?}");
    assert!(left[2] <= 5e-2 && right[2] <= 5e-2, "{left:?} {right:?}");
}

#[test]
fn window_32_at_256() {
    let (a, b) = p3_tables();
    let c = build_coupling(256).unwrap();
    let inv = ansatz_inverse(&p3(), a, b, 256).unwrap();
    let r = inverse_residuals(&inv, 0.5, 1.0, &c, 32).unwrap();
    assert!(r.left <= 5e-2 && r.right <= 5e-2, "{r:?}");
}

#[test]
fn leading_block_matches_dense_inverse() {
    let (a, b) = p3_tables();
    let params = p3();
    let mut diffs = Vec::new();
    for n in [256, 1024] {
        let c = build_coupling(n).unwrap();
        let inv = ansatz_inverse(&params, a, b, n).unwrap();
        let num = numeric_inverse(0.5, 1.0, &c).unwrap();
        let d = (inv.entries().view((0, 0), (16, 16)) - num.entries().view((0, 0), (16, 16))).amax();
        diffs.push(d);
    }
    assert!(diffs[1] <= 1e-2, "{diffs:?}");
    assert!(strictly_decreasing(&diffs), "{diffs:?}");
}
