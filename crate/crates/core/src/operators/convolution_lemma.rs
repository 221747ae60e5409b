//! `G_j = sum_(k>=0) 2^(-|k-j| delta) g_k` and the comparison of the
//! Herz-Morrey norms of `||{G_j}||_(l^beta)` and `||{g_k}||_(l^beta)`.

use crate::error::{invalid, Error, Result};
use crate::grid::SampledFunction;
use crate::herz::{grand_herz_morrey_norm, HerzParams};
use crate::operators::vector::ell_r_fields;
use crate::report::{ConstantReport, SampleRatio};

/// Pointwise `||{G_j}_(j>=0)||_(l^beta)` for `g_0..g_(J-1)` (zero beyond).
///
/// For `j >= J` the sequence is `G_j = 2^(-(j-J+1) delta) G_(J-1)`, so the
/// tail is summed in closed form.
pub fn convolved_ell_beta(g: &[Vec<f64>], delta: f64, beta: f64) -> Vec<f64> {
    let count = g.len();
    let len = g.first().map_or(0, Vec::len);
    let fields: Vec<Vec<f64>> = (0..count)
        .map(|j| {
            (0..len)
                .map(|i| {
                    g.iter()
                        .enumerate()
                        .map(|(k, gk)| 2f64.powf(-(k.abs_diff(j) as f64) * delta) * gk[i])
                        .sum()
                })
                .collect()
        })
        .collect();
    let mut norm = ell_r_fields(&fields, beta);
    if beta.is_finite() {
        let rho = 2f64.powf(-delta * beta);
        let tail = rho / (1.0 - rho);
        let last = &fields[count - 1];
        for (v, b) in norm.iter_mut().zip(last) {
            *v = (v.powf(beta) + tail * b.powf(beta)).powf(1.0 / beta);
        }
    }
    norm
}

/// Ratio of the two sides of the discrete convolution inequality for one
/// nonnegative sequence `g_0..g_(J-1)`.
pub fn discrete_convolution_bound(
    g: &[SampledFunction],
    delta: f64,
    beta: f64,
    params: &HerzParams,
) -> Result<ConstantReport> {
    if !(delta > 0.0) {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    if !(beta > 0.0) {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    let first = g.first().ok_or_else(|| invalid("empty sequence"))?;
    let spec = *first.spec();
    if g.iter().any(|f| *f.spec() != spec) {
        return Err(Error::GridMismatch);
    }
    if g.iter()
        .flat_map(|f| f.values())
        .any(|v| v.re < 0.0 || v.im != 0.0)
    {
        return Err(invalid("sequence members must be nonnegative"));
    }
    let fields: Vec<Vec<f64>> = g.iter().map(SampledFunction::real_parts).collect();
    let lhs_field = convolved_ell_beta(&fields, delta, beta);
    let rhs_field = ell_r_fields(&fields, beta);
    let lhs = grand_herz_morrey_norm(&SampledFunction::from_real(spec, lhs_field, "G")?, params)?;
    let rhs = grand_herz_morrey_norm(&SampledFunction::from_real(spec, rhs_field, "g")?, params)?;
    Ok(ConstantReport::from_samples(
        "discrete_convolution",
        vec![SampleRatio::new(first.label(), lhs.value, rhs.value)],
    ))
}
