mod common;

use common::{bump_params, bumps, line};
use herzlab::corpus::band_limited_corpus;
use herzlab::fft;
use herzlab::grid::make_grid;
use herzlab::littlewood_paley::{
    build_admissible_dual, build_admissible_pair, build_kernel_family, build_resolution_of_unity,
    build_resolution_of_unity_with, calderon_reconstruct, calderon_reconstruct_sampled,
    eta_majorization_check, kernel_profile, peetre_maximal, peetre_of_field, relative_l2_error,
    BumpProfile, FilterBank,
};
use herzlab::{Complex64, GridSpec, SampledFunction};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random spectrum on lattice radii strictly inside `(lo, hi)`.
fn band_function(g: &GridSpec, lo: f64, hi: f64, seed: u64) -> SampledFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spectrum: Vec<Complex64> = fft::frequency_radii(g)
        .into_iter()
        .map(|r| {
            if r > lo && r < hi {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    SampledFunction::new(*g, fft::inverse(g, &spectrum), "band").unwrap()
}

fn resolved(bank: &FilterBank) -> Vec<usize> {
    let band = 2f64.powi(bank.j_max);
    fft::frequency_radii(&bank.spec)
        .into_iter()
        .enumerate()
        .filter(|(_, r)| *r <= band)
        .map(|(i, _)| i)
        .collect()
}

#[test]
fn resolutions_of_unity_sum_to_one() {
    let g = line();
    for bank in [
        build_resolution_of_unity(&g).unwrap(),
        build_resolution_of_unity_with(&g, BumpProfile::alternate()).unwrap(),
    ] {
        for i in resolved(&bank) {
            let s: f64 = bank.levels.iter().map(|l| l[i]).sum();
            assert!((s - 1.0).abs() <= 1e-12, "sum {s} at {i}");
        }
        assert!(bank
            .levels
            .iter()
            .flatten()
            .all(|v| (0.0..=1.0 + 1e-15).contains(v)));
    }
}

#[test]
fn dual_reproduces_the_identity() {
    let g = line();
    let bank = build_admissible_dual(&build_admissible_pair(&g).unwrap()).unwrap();
    let duals = bank.duals.as_ref().unwrap();
    for i in resolved(&bank) {
        let s: f64 = bank
            .levels
            .iter()
            .zip(duals)
            .map(|(l, d)| l[i] * d[i])
            .sum();
        assert!((s - 1.0).abs() <= 1e-10, "{s}");
    }
}

#[test]
fn distant_levels_annihilate_a_band() {
    let g = line();
    let bank = build_resolution_of_unity(&g).unwrap();
    for j in 1..bank.j_max {
        let f = band_function(&g, 2f64.powi(j - 1), 2f64.powi(j + 1), j as u64);
        let scale = f.max_abs();
        for (i, conv) in bank.apply_all(&f).unwrap().iter().enumerate() {
            if (i as i32 - j).abs() >= 2 {
                let worst = conv.iter().map(|v| v.norm()).fold(0.0, f64::max);
                assert!(worst <= 1e-10 * scale, "level {i} on band {j}: {worst}");
            }
        }
    }
}

#[test]
fn reconstruction_of_band_limited_packets() {
    let g = make_grid(1, 6, 16384, -20, 6).unwrap();
    let bank = build_admissible_dual(&build_admissible_pair(&g).unwrap()).unwrap();
    for f in band_limited_corpus(&g, 8, 99).unwrap() {
        let conv = calderon_reconstruct(&f, &bank).unwrap();
        let sampled = calderon_reconstruct_sampled(&f, &bank).unwrap();
        assert!(relative_l2_error(&conv.function, &f) <= 1e-8);
        assert!(relative_l2_error(&sampled.function, &f) <= 1e-6);
    }
}

#[test]
fn reconstruction_is_idempotent() {
    let g = line();
    let bank = build_admissible_dual(&build_admissible_pair(&g).unwrap()).unwrap();
    let seedling = band_function(&g, 0.0, 2f64.powi(bank.j_max - 1), 5);
    let once = calderon_reconstruct(&seedling, &bank).unwrap().function;
    let twice = calderon_reconstruct(&once, &bank).unwrap().function;
    assert!(relative_l2_error(&twice, &once) <= 1e-8);
}

#[test]
fn banks_round_trip_through_json() {
    let g = line();
    for bank in [
        build_resolution_of_unity(&g).unwrap(),
        build_admissible_dual(&build_admissible_pair(&g).unwrap()).unwrap(),
        build_kernel_family(&g, 1, 0.5).unwrap(),
    ] {
        assert_eq!(
            FilterBank::from_json(&bank.to_json().unwrap()).unwrap(),
            bank
        );
    }
}

#[test]
fn kernel_vanishes_to_moment_order() {
    let g = line();
    for s in [0, 1, 2, 3] {
        let p = kernel_profile(&build_kernel_family(&g, s, 0.5).unwrap()).unwrap();
        // k^(r) = O(r^(S+1)) at the origin; the Gaussian factor bends the slope by ~1e-5.
        let (a, b) = (p.k_hat(1e-3), p.k_hat(2e-3));
        assert!(
            (b / a).log2() >= (s + 1) as f64 - 1e-4,
            "S = {s}: slope {}",
            (b / a).log2()
        );
        assert!(p.k0_hat(0.0) > 0.0 && p.k_hat(0.5) > 0.0);
    }
}

/// `max_y |g(y)| / (1 + 2^j |x - y|)^a` by direct double loop.
fn brute_peetre(g: &GridSpec, conv: &[Complex64], j: i32, a: f64) -> Vec<f64> {
    let n = 2f64.powi(j);
    (0..g.len())
        .map(|x| {
            (0..g.len())
                .map(|y| conv[y].norm() / (1.0 + n * (g.point(x)[0] - g.point(y)[0]).abs()).powf(a))
                .fold(0.0, f64::max)
        })
        .collect()
}

#[test]
fn peetre_matches_exhaustive_search() {
    let g = make_grid(1, 4, 512, -12, 4).unwrap();
    let bank = build_resolution_of_unity(&g).unwrap();
    let f = bumps(g, &[(1.0, 1.0, 0.4), (-0.5, -3.0, 0.2)]);
    for (j, conv) in bank.apply_all(&f).unwrap().iter().enumerate() {
        for a in [0.5, 2.0, 4.0] {
            let fast = peetre_of_field(&g, conv, j as i32, a).unwrap();
            let slow = brute_peetre(&g, conv, j as i32, a);
            for (u, v) in fast.iter().zip(&slow) {
                assert!(
                    (u - v).abs() <= 1e-14 * v.max(1e-300),
                    "j = {j}, a = {a}: {u} vs {v}"
                );
            }
        }
    }
}

#[test]
fn large_a_collapses_to_the_modulus() {
    let g = line();
    let bank = build_resolution_of_unity(&g).unwrap();
    let f = bumps(g, &[(1.0, 0.0, 1.0), (0.7, 6.0, 0.3)]);
    for j in 2..=bank.j_max {
        let conv = bank.apply(&f, j).unwrap();
        let sup = peetre_maximal(&f, &bank, j, 64.0).unwrap().real_parts();
        let top = conv.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let excess = conv
            .iter()
            .zip(&sup)
            .map(|(c, s)| s - c.norm())
            .fold(0.0, f64::max);
        assert!(excess <= 0.05 * top, "j = {j}: {excess} of {top}");
    }
}

#[test]
fn eta_majorization_is_grid_stable() {
    let c = |n: usize| {
        let g = make_grid(1, 6, n, -20, 6).unwrap();
        let bank = build_resolution_of_unity(&g).unwrap();
        let f = band_limited_corpus(&g, 1, 3).unwrap().remove(0);
        eta_majorization_check(&f, &bank, 3, &[3], 1.0, 2.0)
            .unwrap()
            .max_ratio
    };
    let (a, b) = (c(4096), c(8192));
    assert!(a.is_finite() && a > 0.0);
    assert!((b / a - 1.0).abs() <= 0.1, "{a} -> {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn peetre_dominates_convolution(p in bump_params(), a in 0.5f64..8.0) {
        let g = line();
        let bank = build_resolution_of_unity(&g).unwrap();
        let f = bumps(g, &p);
        for (j, conv) in bank.apply_all(&f).unwrap().iter().enumerate() {
            let sup = peetre_of_field(&g, conv, j as i32, a).unwrap();
            for (c, s) in conv.iter().zip(&sup) {
                prop_assert!(c.norm() <= *s);
            }
        }
    }
}
