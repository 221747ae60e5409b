//! The five kernel characterizations built from `k_0`, `k` and the dilates
//! `k_t`, with the t-integral discretized on a log-spaced grid.
//!
//! Conventions:
//! - discrete sums use `k_0` at `j = 0` and `k(2^-j .)` for `j >= 1`;
//! - the `k_0` Peetre term is the weighted sup of `|k_0 * f|` at scale `1`
//!   with the same `a` as the other levels;
//! - with `beta = inf` both the level sum and the t-integral become maxima.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::grid::{GridSpec, SampledFunction};
use crate::herz::herz_norm_of_field;
use crate::littlewood_paley::{filters::apply_real, kernel_profile, weighted_sup, BankKind};
use crate::spaces::tl::{ell_beta_combine, smoothness_weights, TLParams};

pub const NORM_NAMES: [&str; 5] = ["norm1", "norm2", "norm3", "norm4", "norm5"];

/// Flag raised when the t-grid is coarser than a quarter octave.
pub const FLAG_QUADRATURE: &str = "t_grid_coarse";
/// Flag raised when `a r > n` fails.
pub const FLAG_PEETRE_HYPOTHESIS: &str = "peetre_hypothesis";
/// Always present: `k_0*` is read as the Peetre maximal of `k_0 * f` at scale 1.
pub const FLAG_K0_PEETRE: &str = "k0_peetre_interpretation";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpread {
    pub a: String,
    pub b: String,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub spread: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormComparison {
    pub values: BTreeMap<String, f64>,
    /// `values[i] / values[j]` in `NORM_NAMES` order; `1` when both vanish.
    pub pairwise_ratios: Vec<Vec<f64>>,
    /// Filled by [`summarize_corpus`].
    pub corpus_worst: Vec<PairSpread>,
    /// Largest pointwise excess of the convolution integrand over its Peetre
    /// counterpart, relative to the Peetre maximum: `[t-integral, discrete]`.
    pub pointwise_ordering_gap: [f64; 2],
    pub flags: Vec<String>,
}

impl NormComparison {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

/// Trapezoid weights in `ln t` for a strictly decreasing node list.
pub fn log_trapezoid_weights(t_grid: &[f64]) -> Vec<f64> {
    let u: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let m = u.len();
    if m == 1 {
        return vec![1.0];
    }
    (0..m)
        .map(|i| {
            let left = if i > 0 { u[i - 1] - u[i] } else { 0.0 };
            let right = if i + 1 < m { u[i] - u[i + 1] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Area of the disk `|z| < t` inside `[x0, x1] x [y0, y1]`, by a midpoint
/// rule in `x` over the exact vertical chord lengths.
fn disk_rect_area(t: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    const STEPS: usize = 512;
    let dx = (x1 - x0) / STEPS as f64;
    (0..STEPS)
        .map(|k| {
            let x = x0 + (k as f64 + 0.5) * dx;
            let half = (t * t - x * x).max(0.0).sqrt();
            (half.min(y1) - (-half).max(y0)).max(0.0)
        })
        .sum::<f64>()
        * dx
}

/// Cells around the origin covered by the ball `|z| < t`, as
/// `(dx, dy, overlap area)`.
fn disk_stencil(spec: &GridSpec, t: f64) -> Vec<(isize, isize, f64)> {
    let h = spec.step();
    let reach = (t / h + 1.0).ceil() as isize;
    let mut out = Vec::new();
    for dy in -reach..=reach {
        for dx in -reach..=reach {
            let (cx, cy) = (dx as f64 * h, dy as f64 * h);
            let near = ((cx.abs() - h / 2.0).max(0.0)).hypot((cy.abs() - h / 2.0).max(0.0));
            let far = (cx.abs() + h / 2.0).hypot(cy.abs() + h / 2.0);
            let w = if near >= t {
                0.0
            } else if far <= t {
                h * h
            } else {
                disk_rect_area(t, cx - h / 2.0, cx + h / 2.0, cy - h / 2.0, cy + h / 2.0)
            };
            if w > 0.0 {
                out.push((dx, dy, w));
            }
        }
    }
    out
}

/// `(t^-n int_(|z|<t) g(x+z)^beta dz)^(1/beta)` with `g` piecewise constant
/// on cells and zero outside the domain; the sup over the ball when
/// `beta = inf`.
pub fn local_means(spec: &GridSpec, g: &[f64], t: f64, beta: f64) -> Vec<f64> {
    let n = spec.dimension() as i32;
    let side = spec.samples_per_axis();
    let h = spec.step();
    if n == 1 {
        if beta.is_infinite() {
            let reach = (t / h + 0.5).ceil() as isize;
            return (0..side as isize)
                .into_par_iter()
                .map(|i| {
                    (i - reach..=i + reach)
                        .filter(|&m| m >= 0 && (m as usize) < side)
                        .filter(|&m| ((m - i).abs() as f64 - 0.5) * h < t)
                        .map(|m| g[m as usize])
                        .fold(0.0, f64::max)
                })
                .collect();
        }
        let powered: Vec<f64> = g.iter().map(|v| v.powf(beta)).collect();
        let mut prefix = vec![0.0; side + 1];
        for i in 0..side {
            prefix[i + 1] = prefix[i] + powered[i] * h;
        }
        let a = spec.halfwidth();
        let primitive = |y: f64| -> f64 {
            let c = ((y + a) / h).clamp(0.0, side as f64);
            let m = c.floor() as usize;
            if m >= side {
                prefix[side]
            } else {
                prefix[m] + (c - m as f64) * h * powered[m]
            }
        };
        return (0..side)
            .map(|i| {
                let x = spec.axis_coord(i);
                ((primitive(x + t) - primitive(x - t)).max(0.0) / t).powf(1.0 / beta)
            })
            .collect();
    }
    let stencil = disk_stencil(spec, t);
    let scale = t.powi(n);
    (0..spec.len())
        .into_par_iter()
        .map(|idx| {
            let [i, j] = spec.unflatten(idx);
            let mut acc = 0.0;
            for &(dx, dy, w) in &stencil {
                let (x, y) = (i as isize + dx, j as isize + dy);
                if x < 0 || y < 0 || x >= side as isize || y >= side as isize {
                    continue;
                }
                let v = g[y as usize * side + x as usize];
                if beta.is_infinite() {
                    acc = f64::max(acc, v);
                } else {
                    acc += w * v.powf(beta);
                }
            }
            if beta.is_infinite() {
                acc
            } else {
                (acc / scale).powf(1.0 / beta)
            }
        })
        .collect()
}

/// Pointwise integrands before the outer Herz norm.
struct Integrands {
    k0: Vec<f64>,
    k0_peetre: Vec<f64>,
    conv_t: Vec<f64>,
    peetre_t: Vec<f64>,
    local_t: Vec<f64>,
    conv_j: Vec<f64>,
    peetre_j: Vec<f64>,
}

fn integrands(f: &SampledFunction, params: &TLParams) -> Result<Integrands> {
    let bank = &params.bank;
    let profile = kernel_profile(bank)?;
    let spec = bank.spec;
    if *f.spec() != spec {
        return Err(Error::GridMismatch);
    }
    let a = params.peetre.a;
    let beta = params.beta;
    let s = params.s;
    let spectrum = fft::forward(&spec, f.values());
    let magnitudes = |m: &[f64]| -> Vec<f64> {
        apply_real(&spec, &spectrum, m)
            .iter()
            .map(|v| v.norm())
            .collect()
    };

    let levels: Vec<Vec<f64>> = bank.levels.iter().map(|m| magnitudes(m)).collect();
    let peetre_levels = levels
        .iter()
        .enumerate()
        .map(|(j, g)| weighted_sup(&spec, g, 2f64.powi(-(j as i32)), a))
        .collect::<Result<Vec<_>>>()?;
    let level_weights = smoothness_weights(levels.len(), s);

    let mut conv_t = Vec::with_capacity(params.t_grid.len());
    let mut peetre_t = Vec::with_capacity(params.t_grid.len());
    let mut local_t = Vec::with_capacity(params.t_grid.len());
    for &t in &params.t_grid {
        let g = magnitudes(&profile.k_t_multiplier(&spec, t));
        peetre_t.push(weighted_sup(&spec, &g, t, a)?);
        local_t.push(local_means(&spec, &g, t, beta));
        conv_t.push(g);
    }
    let quad = log_trapezoid_weights(&params.t_grid);
    let t_weights: Vec<f64> = params
        .t_grid
        .iter()
        .zip(&quad)
        .map(|(t, w)| {
            let base = t.powf(-s);
            if beta.is_infinite() {
                base
            } else {
                base * w.powf(1.0 / beta)
            }
        })
        .collect();

    Ok(Integrands {
        k0: levels[0].clone(),
        k0_peetre: peetre_levels[0].clone(),
        conv_t: ell_beta_combine(&conv_t, &t_weights, beta),
        peetre_t: ell_beta_combine(&peetre_t, &t_weights, beta),
        local_t: ell_beta_combine(&local_t, &t_weights, beta),
        conv_j: ell_beta_combine(&levels, &level_weights, beta),
        peetre_j: ell_beta_combine(&peetre_levels, &level_weights, beta),
    })
}

fn relative_excess(lower: &[f64], upper: &[f64]) -> f64 {
    let top = upper.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return lower.iter().cloned().fold(0.0, f64::max);
    }
    lower
        .iter()
        .zip(upper)
        .map(|(l, u)| (l - u) / top)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// All five kernel norms of `f` and their pairwise ratios.
pub fn kernel_norms(f: &SampledFunction, params: &TLParams) -> Result<NormComparison> {
    if params.bank.kind != BankKind::KernelFamily {
        return Err(Error::FilterBank(
            "kernel norms need a kernel family".into(),
        ));
    }
    let profile = kernel_profile(&params.bank)?;
    if !(params.s < profile.moment_order as f64 + 1.0) {
        return Err(invalid(format!(
            "s = {} must be below S + 1 = {}",
            params.s,
            profile.moment_order + 1
        )));
    }
    let ig = integrands(f, params)?;
    let herz = |field: &[f64]| -> Result<f64> {
        Ok(herz_norm_of_field(field.to_vec(), &params.herz)?.value)
    };
    let h_k0 = herz(&ig.k0)?;
    let h_k0_peetre = herz(&ig.k0_peetre)?;
    let values = [
        h_k0 + herz(&ig.conv_t)?,
        h_k0_peetre + herz(&ig.peetre_t)?,
        h_k0 + herz(&ig.local_t)?,
        herz(&ig.peetre_j)?,
        herz(&ig.conv_j)?,
    ];
    let pairwise_ratios = values
        .iter()
        .map(|a| {
            values
                .iter()
                .map(|b| if *a == 0.0 && *b == 0.0 { 1.0 } else { a / b })
                .collect()
        })
        .collect();
    let mut flags = vec![FLAG_K0_PEETRE.to_string()];
    if !params.t_grid_resolved() {
        flags.push(FLAG_QUADRATURE.to_string());
    }
    if !params.peetre.hypothesis_holds(params.bank.spec.dimension()) {
        flags.push(FLAG_PEETRE_HYPOTHESIS.to_string());
    }
    Ok(NormComparison {
        values: NORM_NAMES
            .iter()
            .zip(values)
            .map(|(n, v)| (n.to_string(), v))
            .collect(),
        pairwise_ratios,
        corpus_worst: Vec::new(),
        pointwise_ordering_gap: [
            relative_excess(&ig.conv_t, &ig.peetre_t),
            relative_excess(&ig.conv_j, &ig.peetre_j),
        ],
        flags,
    })
}

/// Per-pair extremes of `values[a] / values[b]` over the comparisons, for
/// `a < b` in `NORM_NAMES` order. Members where both vanish are ignored.
pub fn summarize_corpus(comparisons: &[NormComparison]) -> Vec<PairSpread> {
    let mut out = Vec::new();
    for (i, a) in NORM_NAMES.iter().enumerate() {
        for (j, b) in NORM_NAMES.iter().enumerate().skip(i + 1) {
            let (mut max_ratio, mut min_ratio) = (f64::NEG_INFINITY, f64::INFINITY);
            for c in comparisons {
                let (va, vb) = (c.values[*a], c.values[*b]);
                if va == 0.0 && vb == 0.0 {
                    continue;
                }
                let r = c.pairwise_ratios[i][j];
                max_ratio = max_ratio.max(r);
                min_ratio = min_ratio.min(r);
            }
            if max_ratio == f64::NEG_INFINITY {
                max_ratio = 1.0;
                min_ratio = 1.0;
            }
            out.push(PairSpread {
                a: a.to_string(),
                b: b.to_string(),
                max_ratio,
                min_ratio,
                spread: if min_ratio > 0.0 {
                    max_ratio / min_ratio
                } else {
                    f64::INFINITY
                },
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn trapezoid_weights_sum_to_log_span() {
        let t: Vec<f64> = (0..9).map(|i| 2f64.powf(-(i as f64) / 4.0)).collect();
        let w = log_trapezoid_weights(&t);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0 * std::f64::consts::LN_2).abs() < 1e-14);
        assert!((w[0] - w[1] / 2.0).abs() < 1e-15);
    }

    #[test]
    fn local_means_of_a_constant() {
        for dim in [1usize, 2] {
            let spec = make_grid(dim, 3, 64, -4, 3).unwrap();
            let g = vec![2.0; spec.len()];
            let t = 0.3;
            let vol = if dim == 1 { 2.0 } else { std::f64::consts::PI };
            let centre = if dim == 1 { 32 } else { spec.flatten([32, 32]) };
            let m = local_means(&spec, &g, t, 2.0);
            let expected = (4.0 * vol).sqrt();
            assert!(
                (m[centre] - expected).abs() < 2e-3 * expected,
                "dim {dim}: {}",
                m[centre]
            );
        }
    }

    #[test]
    fn disk_stencil_area() {
        let spec = make_grid(2, 3, 64, -4, 3).unwrap();
        let t = 0.7;
        let area: f64 = disk_stencil(&spec, t).iter().map(|s| s.2).sum();
        let exact = std::f64::consts::PI * t * t;
        assert!((area - exact).abs() < 1e-5 * exact, "{area} vs {exact}");
    }
}
