//! Sequences of functions on one grid and their pointwise `l^r` norms.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grid::SampledFunction;

#[derive(Clone, Debug, PartialEq)]
pub struct VectorFunction {
    members: Vec<SampledFunction>,
    r: f64,
}

impl VectorFunction {
    /// Needs at least one member, a shared grid and `r > 0`.
    pub fn new(members: Vec<SampledFunction>, r: f64) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| invalid("vector function needs a member"))?;
        if members.iter().any(|m| m.spec() != first.spec()) {
            return Err(Error::GridMismatch);
        }
        if !(r > 0.0) {
            return Err(invalid(format!("r must be positive, got {r}")));
        }
        Ok(Self { members, r })
    }

    pub fn members(&self) -> &[SampledFunction] {
        &self.members
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// The vector-valued inequalities need `1 < r < inf`.
    pub fn require_theorem_range(&self) -> Result<()> {
        if self.r > 1.0 && self.r.is_finite() {
            Ok(())
        } else {
            Err(invalid(format!("need 1 < r < inf, got {}", self.r)))
        }
    }
}

/// Pointwise `(sum_j |a_j|^r)^(1/r)` of real fields; `r = inf` takes the max.
pub fn ell_r_fields(fields: &[Vec<f64>], r: f64) -> Vec<f64> {
    let len = fields.first().map_or(0, Vec::len);
    (0..len)
        .map(|i| {
            if r.is_infinite() {
                fields.iter().map(|f| f[i].abs()).fold(0.0, f64::max)
            } else {
                fields
                    .iter()
                    .map(|f| f[i].abs().powf(r))
                    .sum::<f64>()
                    .powf(1.0 / r)
            }
        })
        .collect()
}

/// `(sum_j |op(f_j)|^r)^(1/r)` pointwise.
pub fn vector_ell_r<F>(vf: &VectorFunction, op: F) -> Result<SampledFunction>
where
    F: Fn(&SampledFunction) -> Result<SampledFunction> + Sync,
{
    let images: Vec<Vec<f64>> = vf
        .members
        .par_iter()
        .map(|m| op(m).map(|g| g.abs()))
        .collect::<Result<_>>()?;
    let spec = *vf.members[0].spec();
    SampledFunction::from_real(spec, ell_r_fields(&images, vf.r), format!("l^{}", vf.r))
}
