//! Shared fixtures for the pipeline benchmarks.

use heraldsim::defaults::Numerics;
use heraldsim::{FilterParams, SourceParams};

pub fn state1() -> SourceParams {
    SourceParams::in_sigma_units(0.0, 0.0, 0.1, 0.1).expect("valid preset")
}

pub fn state5() -> SourceParams {
    SourceParams::in_sigma_units(-1.3, 1.3, 0.1, 0.1).expect("valid preset")
}

pub fn optimum_filter() -> FilterParams {
    FilterParams::new(0.95, 1.1).expect("valid filter")
}

pub fn default_numerics() -> Numerics {
    Numerics::default()
}
