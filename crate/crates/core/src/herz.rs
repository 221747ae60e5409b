//! Homogeneous weighted grand Herz-Morrey norm and its split form with the
//! exponent frozen at the origin and at infinity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exponent::ExponentFunction;
use crate::grid::{GridSpec, SampledFunction};
use crate::lebesgue::Modular;
use crate::weight::Weight;

/// Equivalence constant assumed between the norm and its split form.
pub const SPLIT_EQUIVALENCE_CONSTANT: f64 = 16.0;

/// `2^(i/2 - 24)` for `i = 0..=96`.
pub fn default_delta_grid() -> Vec<f64> {
    log_spaced_delta_grid(97)
}

/// `points` log-spaced values covering `[2^-24, 2^24]`.
pub fn log_spaced_delta_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points)
        .map(|i| 2f64.powf(-24.0 + 48.0 * i as f64 / (points - 1) as f64))
        .collect()
}

#[derive(Clone, Debug)]
pub struct HerzParams {
    pub alpha: ExponentFunction,
    pub p: f64,
    pub q: ExponentFunction,
    pub lambda: f64,
    pub theta: f64,
    pub w: Weight,
    pub delta_grid: Vec<f64>,
    pub k0_range: (i32, i32),
}

impl HerzParams {
    /// Default delta grid and the full dyadic range of the grid.
    pub fn new(
        alpha: ExponentFunction,
        p: f64,
        q: ExponentFunction,
        lambda: f64,
        theta: f64,
        w: Weight,
    ) -> Result<Self> {
        let spec = *q.spec();
        let params = Self {
            alpha,
            p,
            q,
            lambda,
            theta,
            w,
            delta_grid: default_delta_grid(),
            k0_range: (spec.k_min(), spec.k_max()),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn spec(&self) -> &GridSpec {
        self.q.spec()
    }

    pub fn with_delta_grid(mut self, grid: Vec<f64>) -> Result<Self> {
        self.delta_grid = grid;
        self.validate()?;
        Ok(self)
    }

    pub fn with_k0_range(mut self, lo: i32, hi: i32) -> Result<Self> {
        self.k0_range = (lo, hi);
        self.validate()?;
        Ok(self)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.spec();
        if self.alpha.spec() != spec || self.w.spec() != spec {
            return Err(Error::GridMismatch);
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(invalid(format!("p must exceed 1, got {}", self.p)));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(invalid(format!(
                "theta must be positive, got {}",
                self.theta
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(invalid(format!(
                "lambda must be nonnegative, got {}",
                self.lambda
            )));
        }
        if self.delta_grid.is_empty()
            || self.delta_grid[0] <= 0.0
            || self.delta_grid.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(invalid(
                "delta grid must be positive and strictly increasing",
            ));
        }
        let (lo, hi) = self.k0_range;
        if lo > hi || lo < spec.k_min() || hi > spec.k_max() {
            return Err(invalid(format!(
                "k0 range [{lo}, {hi}] outside [{}, {}]",
                spec.k_min(),
                spec.k_max()
            )));
        }
        self.q.require_p0()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HerzNormBreakdown {
    pub value: f64,
    pub argmax_delta: f64,
    pub argmax_k0: i32,
    /// First shell index of `shell_norms`.
    pub k_min: i32,
    /// `||2^(k alpha) f chi_k||_(L^q(w))` for `k = k_min..`.
    pub shell_norms: Vec<f64>,
    pub split_value: f64,
}

/// Result of the `(delta, k0)` sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMax {
    pub value: f64,
    pub delta: f64,
    pub k0: i32,
}

/// Maximizes `2^(-k0 lambda) (delta^theta sum_(k<=k0) s_k^P)^(1/P)`,
/// `P = p (1 + delta)`, over `delta_grid x [k0_lo, k0_hi]`.
///
/// `shells[i]` is `s_(k_min + i)`. Powers are accumulated in log space
/// relative to the running maximum. Ties keep the smallest `delta`, then
/// the smallest `k0`.
pub fn sweep(
    shells: &[f64],
    k_min: i32,
    k0_range: (i32, i32),
    p: f64,
    theta: f64,
    lambda: f64,
    delta_grid: &[f64],
) -> SweepMax {
    let logs: Vec<f64> = shells
        .iter()
        .map(|&s| if s > 0.0 { s.ln() } else { f64::NEG_INFINITY })
        .collect();
    let ln2 = std::f64::consts::LN_2;
    let mut best = SweepMax {
        value: 0.0,
        delta: delta_grid.first().copied().unwrap_or(f64::NAN),
        k0: k0_range.0,
    };
    let mut best_log = f64::NEG_INFINITY;
    for &delta in delta_grid {
        let power = p * (1.0 + delta);
        let mut shift = f64::NEG_INFINITY;
        let mut acc = 0.0;
        for (i, &ls) in logs.iter().enumerate() {
            let k = k_min + i as i32;
            if k > k0_range.1 {
                break;
            }
            if ls > f64::NEG_INFINITY {
                if ls > shift {
                    acc = acc * (power * (shift - ls)).exp() + 1.0;
                    shift = ls;
                } else {
                    acc += (power * (ls - shift)).exp();
                }
            }
            if k < k0_range.0 || shift == f64::NEG_INFINITY {
                continue;
            }
            let log_value =
                -(k as f64) * lambda * ln2 + shift + (theta * delta.ln() + acc.ln()) / power;
            if log_value > best_log {
                best_log = log_value;
                best = SweepMax {
                    value: log_value.exp(),
                    delta,
                    k0: k,
                };
            }
        }
    }
    best
}

/// Shell norms with the pointwise factor `2^(k alpha(x))`, and without it.
fn shell_tables(f: &SampledFunction, params: &HerzParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let spec = params.spec();
    if f.spec() != spec {
        return Err(Error::GridMismatch);
    }
    let magnitudes: Vec<f64> = f
        .values()
        .iter()
        .zip(params.w.values())
        .map(|(v, w)| v.norm() * w)
        .collect();
    let q = params.q.values();
    let alpha = params.alpha.values();
    let constant_alpha = params.alpha.as_constant();
    let cell = spec.cell_volume();
    let partition = spec.shell_partition();
    let rows: Vec<(f64, f64)> = partition
        .par_iter()
        .enumerate()
        .map(|(i, cells)| {
            let k = spec.k_min() + i as i32;
            let plain = Modular::new(cell, cells.iter().map(|&c| (magnitudes[c], q[c])))
                .norm()?
                .norm;
            let scaled = match constant_alpha {
                Some(a) => 2f64.powf(k as f64 * a) * plain,
                None => {
                    Modular::new(
                        cell,
                        cells
                            .iter()
                            .map(|&c| (magnitudes[c] * 2f64.powf(k as f64 * alpha[c]), q[c])),
                    )
                    .norm()?
                    .norm
                }
            };
            Ok((scaled, plain))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().unzip())
}

/// `||2^(k alpha(.)) f chi_k||_(L^q(w))` for every annulus of the grid.
pub fn shell_norms(f: &SampledFunction, params: &HerzParams) -> Result<Vec<f64>> {
    params.validate()?;
    Ok(shell_tables(f, params)?.0)
}

/// Split form from unweighted-by-alpha shell norms `||f chi_k||`.
pub fn split_from_shells(plain: &[f64], params: &HerzParams) -> f64 {
    let spec = params.spec();
    let k_min = spec.k_min();
    let a0 = params.alpha.value_at_origin();
    let ai = params.alpha.value_at_infinity();
    let frozen = |origin_only: bool| -> Vec<f64> {
        plain
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let k = k_min + i as i32;
                let a = if origin_only || k < 0 { a0 } else { ai };
                2f64.powf(k as f64 * a) * s
            })
            .collect()
    };
    let (lo, hi) = params.k0_range;
    let mut best: f64 = 0.0;
    if lo <= 0 {
        let near = sweep(
            &frozen(true),
            k_min,
            (lo, hi.min(0)),
            params.p,
            params.theta,
            params.lambda,
            &params.delta_grid,
        );
        best = best.max(near.value);
    }
    if hi > 0 {
        let far = sweep(
            &frozen(false),
            k_min,
            (lo.max(1), hi),
            params.p,
            params.theta,
            params.lambda,
            &params.delta_grid,
        );
        best = best.max(far.value);
    }
    best
}

pub fn grand_herz_morrey_norm(
    f: &SampledFunction,
    params: &HerzParams,
) -> Result<HerzNormBreakdown> {
    params.validate()?;
    let (shells, plain) = shell_tables(f, params)?;
    let k_min = params.spec().k_min();
    let best = sweep(
        &shells,
        k_min,
        params.k0_range,
        params.p,
        params.theta,
        params.lambda,
        &params.delta_grid,
    );
    Ok(HerzNormBreakdown {
        value: best.value,
        argmax_delta: best.delta,
        argmax_k0: best.k0,
        k_min,
        shell_norms: shells,
        split_value: split_from_shells(&plain, params),
    })
}

/// Norm of a nonnegative field on the parameters' grid.
pub fn herz_norm_of_field(field: Vec<f64>, params: &HerzParams) -> Result<HerzNormBreakdown> {
    let f = SampledFunction::from_real(*params.spec(), field, "field")?;
    grand_herz_morrey_norm(&f, params)
}

/// Max of the two suprema with `alpha(0)` below the unit sphere and
/// `alpha_inf` outside.
pub fn split_norm(f: &SampledFunction, params: &HerzParams) -> Result<f64> {
    params.validate()?;
    let (_, plain) = shell_tables(f, params)?;
    Ok(split_from_shells(&plain, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{annulus_mask, make_grid};

    fn params(g: &GridSpec, alpha: f64) -> HerzParams {
        HerzParams::new(
            ExponentFunction::constant(g, alpha).unwrap(),
            2.0,
            ExponentFunction::constant(g, 2.0).unwrap(),
            0.0,
            1.0,
            Weight::unit(g),
        )
        .unwrap()
    }

    fn line() -> GridSpec {
        make_grid(1, 6, 16384, -20, 6).unwrap()
    }

    #[test]
    fn delta_grid_endpoints() {
        let d = default_delta_grid();
        assert_eq!(d.len(), 97);
        assert_eq!(d[0], 2f64.powi(-24));
        assert!((d[96] / 2f64.powi(24) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn disjoint_shells() {
        let g = line();
        let p = params(&g, 0.0);
        let s = shell_norms(&annulus_mask(&g, 0).unwrap(), &p).unwrap();
        for (i, v) in s.iter().enumerate() {
            let k = g.k_min() + i as i32;
            if k == 0 {
                assert!((v - 1.0).abs() < 1e-9);
            } else {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn constant_alpha_factor() {
        let g = line();
        let p = params(&g, 1.0);
        let s = shell_norms(&annulus_mask(&g, 1).unwrap(), &p).unwrap();
        // 2^(k alpha) ‖chi_(D_1)‖_2 = 2 sqrt(2).
        assert!((s[(1 - g.k_min()) as usize] - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn zero_function() {
        let g = line();
        let p = params(&g, 0.3);
        let b = grand_herz_morrey_norm(&SampledFunction::zeros(g, "0"), &p).unwrap();
        assert_eq!(b.value, 0.0);
        assert_eq!(b.split_value, 0.0);
    }

    #[test]
    fn invalid_params_rejected() {
        let g = line();
        let p = params(&g, 0.0);
        assert!(p.clone().with_k0_range(3, 9).is_err());
        assert!(p.clone().with_delta_grid(vec![1.0, 0.5]).is_err());
        assert!(p.with_lambda(-1.0).is_err());
    }

    #[test]
    fn sweep_handles_huge_powers() {
        // At the top of the delta grid the sum collapses onto the largest shell.
        let shells = [0.5, 3.0, 2.9];
        let top = sweep(&shells, -1, (-1, 1), 2.0, 1.0, 0.0, &[2f64.powi(24)]);
        let p = 2.0 * (1.0 + 2f64.powi(24));
        let expect = 3.0 * (2f64.powi(24)).powf(1.0 / p);
        assert!((top.value - expect).abs() < 1e-9);
        assert_eq!(top.k0, 0);
    }
}
