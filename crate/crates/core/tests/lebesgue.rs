mod common;

use common::{bump_params, bumps, fine_line, indicator, line};
use herzlab::lebesgue::{
    holder_check, luxemburg_norm, modular, weighted_norm, DEFAULT_HOLDER_CONSTANT,
};
use herzlab::{ExponentFunction, ExponentProfile, GridSpec, SampledFunction, Weight};
use proptest::prelude::*;

fn log_perturbed(g: &GridSpec, a0: f64, a_inf: f64, c: f64) -> ExponentFunction {
    ExponentFunction::new(g, ExponentProfile::LogPerturbed { a0, a_inf, c }).unwrap()
}

/// Riemann sum over cell centers, written out without the library.
fn power_integral(f: &SampledFunction, p: f64) -> f64 {
    let h = f.spec().step();
    f.values().iter().map(|v| v.norm().powf(p) * h).sum()
}

#[test]
fn piecewise_modular_closed_form() {
    let g = fine_line();
    let f = indicator(g, 0.0, 1.0)
        .add(&indicator(g, 2.0, 3.0).scaled(2.0))
        .unwrap();
    let q = ExponentFunction::new(
        &g,
        ExponentProfile::custom("jump", |x| if x[0] > 1.5 { 3.0 } else { 2.0 }),
    )
    .unwrap();
    // (1/2)^2 on [0, 1] and 1^3 on [2, 3].
    let m = modular(&f, &q, 2.0).unwrap();
    assert!((m - 1.25).abs() <= 2.0 * g.step(), "{m}");
}

#[test]
fn gaussian_l2_norm() {
    let g = fine_line();
    let f = bumps(g, &[(1.0, 0.0, std::f64::consts::FRAC_1_SQRT_2)]);
    let q = ExponentFunction::constant(&g, 2.0).unwrap();
    let expected = (std::f64::consts::PI / 2.0).powf(0.25);
    assert!((luxemburg_norm(&f, &q).unwrap().norm - expected).abs() < 1e-4);
}

#[test]
fn weighted_indicator_norm() {
    let g = fine_line();
    let f = indicator(g, 1.0, 2.0);
    let q = ExponentFunction::constant(&g, 2.0).unwrap();
    let n = weighted_norm(&f, &q, &Weight::power(&g, 1.0)).unwrap();
    assert!((n - (7.0f64 / 3.0).sqrt()).abs() < 1e-3, "{n}");
}

#[test]
fn zero_function_has_zero_norm() {
    let g = line();
    let q = log_perturbed(&g, 2.0, 3.0, 0.1);
    assert_eq!(
        luxemburg_norm(&SampledFunction::zeros(g, "0"), &q)
            .unwrap()
            .norm,
        0.0
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constant_exponent_oracle(p in bump_params(), e in prop::sample::select(vec![1.0, 1.5, 2.0, 4.0])) {
        let g = line();
        let f = bumps(g, &p);
        let q = ExponentFunction::constant(&g, e).unwrap();
        let oracle = power_integral(&f, e).powf(1.0 / e);
        let norm = luxemburg_norm(&f, &q).unwrap().norm;
        prop_assert!((norm - oracle).abs() <= 1e-8 * norm);
    }

    #[test]
    fn homogeneity(p in bump_params(), a0 in 1.1f64..4.0, ai in 1.1f64..4.0, log_c in -6.0f64..6.0, neg: bool) {
        let g = line();
        let f = bumps(g, &p);
        let q = log_perturbed(&g, a0, ai, 0.05);
        let c = if neg { -1.0 } else { 1.0 } * 10f64.powf(log_c);
        let base = luxemburg_norm(&f, &q).unwrap().norm;
        let scaled = luxemburg_norm(&f.scaled(c), &q).unwrap().norm;
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-10 * c.abs() * base);
    }

    #[test]
    fn unit_modular(p in bump_params(), a0 in 0.6f64..5.0, ai in 0.6f64..5.0) {
        let g = line();
        let f = bumps(g, &p);
        let q = log_perturbed(&g, a0, ai, 0.1);
        let r = luxemburg_norm(&f, &q).unwrap();
        let m = modular(&f, &q, r.norm).unwrap();
        prop_assert!((m - 1.0).abs() <= 1e-9, "modular {}", m);
    }

    #[test]
    fn monotone_in_magnitude(p in bump_params(), extra in bump_params(), a0 in 1.1f64..4.0) {
        let g = line();
        let f = bumps(g, &p);
        let boost: Vec<f64> = bumps(g, &extra).abs().iter().map(|b| 1.0 + b).collect();
        let bigger = f.mul_real(&boost).unwrap();
        let q = log_perturbed(&g, a0, 2.0, 0.1);
        let a = luxemburg_norm(&f, &q).unwrap().norm;
        let b = luxemburg_norm(&bigger, &q).unwrap().norm;
        prop_assert!(a <= b + 1e-12);
    }

    #[test]
    fn holder_ratio_at_most_one(p in bump_params(), r in bump_params(), a0 in 1.2f64..4.0, ai in 1.2f64..4.0) {
        let g = line();
        for q in [ExponentFunction::constant(&g, 3.0).unwrap(), log_perturbed(&g, a0, ai, 0.1)] {
            let h = holder_check(&bumps(g, &p), &bumps(g, &r), &q, DEFAULT_HOLDER_CONSTANT).unwrap();
            prop_assert!(h.ratio <= 1.0, "ratio {}", h.ratio);
        }
    }
}
