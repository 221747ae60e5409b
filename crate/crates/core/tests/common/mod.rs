#![allow(dead_code)]

use herzlab::grid::make_grid;
use herzlab::{GridSpec, SampledFunction};
use proptest::prelude::*;

/// `[-64, 64]` with `h = 2^-4`.
pub fn line() -> GridSpec {
    make_grid(1, 6, 2048, -20, 6).unwrap()
}

/// `[-64, 64]` with `h = 2^-6`, for closed forms with `O(h)` error.
pub fn fine_line() -> GridSpec {
    make_grid(1, 6, 8192, -20, 6).unwrap()
}

/// Sum of Gaussian bumps `(amplitude, center, sigma)`.
pub fn bumps(spec: GridSpec, comps: &[(f64, f64, f64)]) -> SampledFunction {
    let comps = comps.to_vec();
    SampledFunction::from_real_fn(spec, "bumps", move |x| {
        comps
            .iter()
            .map(|&(a, c, s)| a * (-(x[0] - c).powi(2) / (2.0 * s * s)).exp())
            .sum()
    })
    .unwrap()
}

pub fn indicator(spec: GridSpec, a: f64, b: f64) -> SampledFunction {
    SampledFunction::from_real_fn(
        spec,
        "chi",
        move |x| if a <= x[0] && x[0] <= b { 1.0 } else { 0.0 },
    )
    .unwrap()
}

/// One to three bumps well inside the domain.
pub fn bump_params() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, -12.0f64..12.0, 0.3f64..4.0), 1..=3)
        .prop_filter("nonzero amplitude", |v| v.iter().any(|c| c.0.abs() > 0.1))
}
