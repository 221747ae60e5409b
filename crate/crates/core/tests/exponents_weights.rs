mod common;

use common::line;
use herzlab::exponent::{conjugate_exponent, log_holder_diagnostics};
use herzlab::grid::make_grid;
use herzlab::weight::{estimate_delta_exponents, muckenhoupt_constant, BallFamily, NestedFamily};
use herzlab::{ExponentFunction, ExponentProfile, Weight};
use proptest::prelude::*;

#[test]
fn conjugate_of_smooth_exponent() {
    let g = line();
    let q = ExponentFunction::new(
        &g,
        ExponentProfile::custom("sin", |x| 2.0 + x[0].sin().powi(2) / 2.0),
    )
    .unwrap();
    let qc = conjugate_exponent(&q).unwrap();
    for (a, b) in q.values().iter().zip(qc.values()) {
        assert!((1.0 / a + 1.0 / b - 1.0).abs() <= 1e-14);
    }
}

#[test]
fn log_decay_constant_at_infinity() {
    let g = line();
    let (a_inf, c) = (0.3, 0.2);
    let a = ExponentFunction::new(
        &g,
        ExponentProfile::custom("log", move |x| {
            a_inf + c / (std::f64::consts::E + x[0].abs()).ln()
        }),
    )
    .unwrap();
    let d = log_holder_diagnostics(&a);
    assert!(d.c_infinity <= c + 0.05, "{d:?}");
}

#[test]
fn step_exponent_fails_local_condition() {
    let c = |n: usize| {
        let g = make_grid(1, 6, n, -20, 6).unwrap();
        let a = ExponentFunction::new(
            &g,
            ExponentProfile::Step {
                left: 1.5,
                right: 3.0,
            },
        )
        .unwrap();
        log_holder_diagnostics(&a).c_local
    };
    let (coarse, fine) = (c(1024), c(8192));
    // Across the jump |x - y| = h, so C grows like ln(1/h).
    assert!(fine > coarse + 1.0, "{coarse} -> {fine}");
}

#[test]
fn unit_weight_constant_exponent_is_one_on_every_ball() {
    let g = line();
    let family = BallFamily::default_for(&g);
    for p in [1.5, 2.0, 4.0] {
        let q = ExponentFunction::constant(&g, p).unwrap();
        let r = muckenhoupt_constant(&Weight::unit(&g), &q, &family).unwrap();
        let tol = 2.0 * g.step() / family.min_radius();
        assert!((r.constant - 1.0).abs() <= tol, "p = {p}: {}", r.constant);
        assert!(!r.diverging);
    }
}

#[test]
fn quarter_power_weight_is_admissible() {
    let constant = |n: usize| {
        let g = make_grid(1, 6, n, -20, 6).unwrap();
        let q = ExponentFunction::constant(&g, 2.0).unwrap();
        muckenhoupt_constant(&Weight::power(&g, 0.25), &q, &BallFamily::default_for(&g)).unwrap()
    };
    let (a, b) = (constant(2048), constant(8192));
    assert!(!a.diverging && !b.diverging);
    assert!(a.constant.is_finite() && a.tilde_constant.is_finite());
    assert!(
        (b.constant / a.constant - 1.0).abs() < 0.1,
        "{} vs {}",
        a.constant,
        b.constant
    );
    assert!(
        a.delta1 > 0.0 && a.delta1 < 1.0 && a.fit_residual < 0.05,
        "{a:?}"
    );
}

#[test]
fn square_weight_diverges() {
    let g = line();
    let q = ExponentFunction::constant(&g, 2.0).unwrap();
    let r =
        muckenhoupt_constant(&Weight::power(&g, 2.0), &q, &BallFamily::default_for(&g)).unwrap();
    assert!(r.diverging, "{}", r.constant);
}

#[test]
fn decay_exponents_of_unit_weight() {
    let g = line();
    let nested = NestedFamily::default_for(&g);
    for p in [1.5, 2.0, 3.0, 4.0] {
        let q = ExponentFunction::constant(&g, p).unwrap();
        let fit = estimate_delta_exponents(&Weight::unit(&g), &q, &nested).unwrap();
        assert!((fit.delta1 - 1.0 / p).abs() <= 0.02, "p = {p}: {fit:?}");
        assert!(
            (fit.delta2 - (1.0 - 1.0 / p)).abs() <= 0.02,
            "p = {p}: {fit:?}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn conjugation_is_an_involution(a0 in 1.1f64..5.0, ai in 1.1f64..5.0, c in 0.0f64..0.1) {
        let g = line();
        let q = ExponentFunction::new(&g, ExponentProfile::LogPerturbed { a0, a_inf: ai, c }).unwrap();
        let back = conjugate_exponent(&conjugate_exponent(&q).unwrap()).unwrap();
        for (a, b) in q.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn muckenhoupt_constant_ignores_weight_scale(log_c in -3.0f64..3.0, gamma in -0.4f64..0.4, a0 in 1.5f64..3.0) {
        let g = line();
        let q = ExponentFunction::new(&g, ExponentProfile::LogPerturbed { a0, a_inf: 2.0, c: 0.05 }).unwrap();
        let family = BallFamily::default_for(&g);
        let w = Weight::power(&g, gamma);
        let base = muckenhoupt_constant(&w, &q, &family).unwrap().constant;
        let scaled = muckenhoupt_constant(&w.scaled(10f64.powf(log_c)).unwrap(), &q, &family).unwrap().constant;
        prop_assert!((scaled / base - 1.0).abs() <= 1e-10, "{} vs {}", base, scaled);
    }
}
