#![allow(dead_code)]

use std::sync::OnceLock;

use vertexkit::extrapolate::SumConfig;
use vertexkit::fmatrix::FBuilder;
use vertexkit::modes::{generate_modes, ExponentPair, ModeTable};

/// Mode tables for `p = 3`, long enough for the default sums.
pub fn p3_tables() -> &'static (ModeTable, ModeTable) {
    static T: OnceLock<(ModeTable, ModeTable)> = OnceLock::new();
    T.get_or_init(|| {
        let l = FBuilder::modes_needed(1024, &SumConfig::default());
        (
            generate_modes(ExponentPair::lower(3).unwrap(), l),
            generate_modes(ExponentPair::upper(3).unwrap(), l),
        )
    })
}

pub fn builder() -> FBuilder {
    let (a, b) = p3_tables();
    FBuilder::new(a.clone(), b.clone(), SumConfig::default()).unwrap()
}

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}
