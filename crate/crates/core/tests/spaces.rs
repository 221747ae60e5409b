mod common;

use common::{bump_params, bumps, line};
use herzlab::fft;
use herzlab::herz::grand_herz_morrey_norm;
use herzlab::littlewood_paley::{
    build_admissible_pair, build_kernel_family, build_resolution_of_unity, PeetreParams,
};
use herzlab::spaces::{
    kernel_norms, tl_norm, tl_norm_admissible, tl_norm_of_levels, tl_norm_peetre, TLParams,
    NORM_NAMES,
};
use herzlab::{Complex64, ExponentFunction, GridSpec, HerzParams, SampledFunction, Weight};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn herz(g: &GridSpec) -> HerzParams {
    HerzParams::new(
        ExponentFunction::constant(g, 0.25).unwrap(),
        2.0,
        ExponentFunction::constant(g, 2.0).unwrap(),
        0.0,
        1.0,
        Weight::unit(g),
    )
    .unwrap()
}

fn peetre(a: f64) -> PeetreParams {
    PeetreParams {
        a,
        t_integrability: 1.0,
        m: a,
    }
}

fn tl(g: &GridSpec, s: f64, beta: f64) -> TLParams {
    TLParams::new(
        herz(g),
        s,
        beta,
        build_resolution_of_unity(g).unwrap(),
        peetre(4.0),
    )
    .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Random spectrum on the lattice points where level `j` of the resolution
/// of unity is exactly one, so every other level vanishes there.
fn single_level(g: &GridSpec, j: usize, seed: u64) -> SampledFunction {
    let bank = build_resolution_of_unity(g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spectrum: Vec<Complex64> = bank.levels[j]
        .iter()
        .map(|&m| {
            if m == 1.0 {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    assert!(
        spectrum.iter().any(|c| c.norm() > 0.0),
        "empty plateau at level {j}"
    );
    SampledFunction::new(*g, fft::inverse(g, &spectrum), "plateau").unwrap()
}

#[test]
fn single_level_reduces_to_a_herz_norm() {
    let g = line();
    let s = 0.5;
    for j in [1usize, 3, 5] {
        let f = single_level(&g, j, 11 + j as u64);
        let modulus =
            SampledFunction::from_real(g, f.values().iter().map(|v| v.norm()).collect(), "abs")
                .unwrap();
        let expected =
            2f64.powf(j as f64 * s) * grand_herz_morrey_norm(&modulus, &herz(&g)).unwrap().value;
        for beta in [1.0, 2.0, f64::INFINITY] {
            let value = tl_norm(&f, &tl(&g, s, beta)).unwrap();
            assert!(
                rel(value, expected) <= 1e-9,
                "j = {j}, beta = {beta}: {value} vs {expected}"
            );
        }
    }
}

#[test]
fn one_nonzero_level_ignores_beta() {
    let g = line();
    let field: Vec<f64> = (0..g.len()).map(|i| ((i % 37) as f64).sqrt()).collect();
    let mut levels = vec![vec![0.0; field.len()]; 4];
    levels[2] = field.clone();
    let base = herzlab::herz::herz_norm_of_field(field, &herz(&g))
        .unwrap()
        .value;
    for beta in [0.5, 1.0, 3.0, f64::INFINITY] {
        let value = tl_norm_of_levels(&levels, &tl(&g, 1.0, beta)).unwrap();
        assert!(rel(value, 4.0 * base) <= 1e-12, "beta = {beta}");
    }
}

#[test]
fn larger_beta_gives_smaller_norm() {
    let g = line();
    let f = bumps(g, &[(1.0, 0.0, 0.7), (-0.5, 5.0, 0.2)]);
    let values: Vec<f64> = [1.0, 2.0, 4.0, f64::INFINITY]
        .iter()
        .map(|&b| tl_norm(&f, &tl(&g, 0.5, b)).unwrap())
        .collect();
    assert!(
        values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)),
        "{values:?}"
    );
}

#[test]
fn large_a_peetre_matches_the_filter_norm() {
    let g = line();
    let f = bumps(g, &[(1.0, 0.0, 1.0), (0.7, 6.0, 0.3)]);
    let params = tl(&g, 0.5, 2.0).with_peetre(peetre(64.0));
    let ratio = tl_norm_peetre(&f, &params).unwrap().value / tl_norm(&f, &params).unwrap();
    assert!((1.0..=1.05).contains(&ratio), "{ratio}");
}

#[test]
fn peetre_hypothesis_is_reported() {
    let g = line();
    let f = bumps(g, &[(1.0, 0.0, 1.0)]);
    let weak = tl(&g, 0.5, 2.0).with_peetre(peetre(0.5));
    assert!(!tl_norm_peetre(&f, &weak).unwrap().hypothesis_holds);
    assert!(
        tl_norm_peetre(&f, &tl(&g, 0.5, 2.0))
            .unwrap()
            .hypothesis_holds
    );
}

#[test]
fn norms_reject_the_wrong_bank() {
    let g = line();
    let f = bumps(g, &[(1.0, 0.0, 1.0)]);
    let ru = tl(&g, 0.5, 2.0);
    assert!(tl_norm_admissible(&f, &ru).is_err());
    assert!(kernel_norms(&f, &ru).is_err());
    let pair = ru
        .clone()
        .with_bank(build_admissible_pair(&g).unwrap())
        .unwrap();
    assert!(tl_norm(&f, &pair).is_err());
    assert!(tl_norm_admissible(&f, &pair).unwrap() > 0.0);
}

#[test]
fn smoothness_at_the_moment_limit_is_rejected() {
    let g = line();
    let f = bumps(g, &[(1.0, 0.0, 1.0)]);
    let moment = 2;
    let bank = build_kernel_family(&g, moment, 0.5).unwrap();
    let at_limit = tl(&g, moment as f64 + 1.0, 2.0)
        .with_bank(bank.clone())
        .unwrap();
    assert!(kernel_norms(&f, &at_limit).is_err());
    let below = tl(&g, moment as f64 + 0.5, 2.0).with_bank(bank).unwrap();
    assert!(kernel_norms(&f, &below).is_ok());
}

#[test]
fn kernel_norms_are_ordered_and_positive() {
    let g = line();
    let f = bumps(g, &[(1.0, -3.0, 0.5), (0.4, 4.0, 2.0)]);
    let params = tl(&g, 0.5, 2.0)
        .with_bank(build_kernel_family(&g, 2, 0.5).unwrap())
        .unwrap();
    let c = kernel_norms(&f, &params).unwrap();
    for name in NORM_NAMES {
        let v = c.value(name).unwrap();
        assert!(v.is_finite() && v > 0.0, "{name} = {v}");
    }
    for gap in c.pointwise_ordering_gap {
        assert!(gap <= 1e-12, "{gap}");
    }
    for (i, row) in c.pairwise_ratios.iter().enumerate() {
        assert!((row[i] - 1.0).abs() <= 1e-15);
        for (j, r) in row.iter().enumerate() {
            assert!((r * c.pairwise_ratios[j][i] - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn zero_function_has_zero_norms() {
    let g = line();
    let f = SampledFunction::from_real(g, vec![0.0; g.len()], "zero").unwrap();
    let params = tl(&g, 0.5, 2.0);
    assert_eq!(tl_norm(&f, &params).unwrap(), 0.0);
    assert_eq!(tl_norm_peetre(&f, &params).unwrap().value, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tl_norm_is_homogeneous(comps in bump_params(), lambda in -50.0f64..50.0) {
        prop_assume!(lambda.abs() > 1e-3);
        let g = line();
        let f = bumps(g, &comps);
        let params = tl(&g, 0.5, 2.0);
        let a = tl_norm(&f.scaled(lambda), &params).unwrap();
        let b = tl_norm(&f, &params).unwrap();
        prop_assert!(rel(a, lambda.abs() * b) <= 1e-10, "{} vs {}", a, lambda.abs() * b);
    }

    #[test]
    fn peetre_norm_dominates(comps in bump_params(), a in 0.5f64..16.0) {
        let g = line();
        let f = bumps(g, &comps);
        let params = tl(&g, 0.5, 2.0).with_peetre(peetre(a));
        let lower = tl_norm(&f, &params).unwrap();
        let upper = tl_norm_peetre(&f, &params).unwrap().value;
        prop_assert!(lower <= upper * (1.0 + 1e-12), "{} > {}", lower, upper);
    }

    #[test]
    fn triangle_inequality(c1 in bump_params(), c2 in bump_params()) {
        let g = line();
        let (f, h) = (bumps(g, &c1), bumps(g, &c2));
        let sum = SampledFunction::new(
            g,
            f.values().iter().zip(h.values()).map(|(a, b)| a + b).collect(),
            "sum",
        )
        .unwrap();
        let params = tl(&g, 0.5, 2.0);
        let n = |x: &SampledFunction| tl_norm(x, &params).unwrap();
        prop_assert!(n(&sum) <= (n(&f) + n(&h)) * (1.0 + 1e-9));
    }
}
