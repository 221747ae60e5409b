//! Triebel-Lizorkin type norms built on the grand Herz-Morrey norm: the
//! filter-bank norm, its admissible-pair form and its Peetre-maximal form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::SampledFunction;
use crate::herz::{herz_norm_of_field, HerzParams};
use crate::littlewood_paley::{max_level, peetre_of_field, BankKind, FilterBank, PeetreParams};

/// Points per octave of the default t-grid.
pub const T_POINTS_PER_OCTAVE: usize = 4;

/// `2^(-j - i/4)` for `j = 0..=j_max`, `i = 0..4`, decreasing from `1`.
pub fn default_t_grid(j_max: i32) -> Vec<f64> {
    let count = (j_max.max(0) as usize + 1) * T_POINTS_PER_OCTAVE;
    (0..count)
        .map(|i| 2f64.powf(-(i as f64) / T_POINTS_PER_OCTAVE as f64))
        .collect()
}

#[derive(Clone, Debug)]
pub struct TLParams {
    pub herz: HerzParams,
    pub s: f64,
    /// `f64::INFINITY` selects the max over levels.
    pub beta: f64,
    pub bank: FilterBank,
    pub peetre: PeetreParams,
    /// Strictly decreasing, in `(0, 1]`.
    pub t_grid: Vec<f64>,
}

impl TLParams {
    /// Default t-grid for the bank's grid.
    pub fn new(
        herz: HerzParams,
        s: f64,
        beta: f64,
        bank: FilterBank,
        peetre: PeetreParams,
    ) -> Result<Self> {
        let t_grid = default_t_grid(max_level(herz.spec()));
        let params = Self {
            herz,
            s,
            beta,
            bank,
            peetre,
            t_grid,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_bank(mut self, bank: FilterBank) -> Result<Self> {
        self.bank = bank;
        self.validate()?;
        Ok(self)
    }

    pub fn with_t_grid(mut self, t_grid: Vec<f64>) -> Result<Self> {
        self.t_grid = t_grid;
        self.validate()?;
        Ok(self)
    }

    pub fn with_peetre(mut self, peetre: PeetreParams) -> Self {
        self.peetre = peetre;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.bank.spec != *self.herz.spec() {
            return Err(Error::GridMismatch);
        }
        if !self.s.is_finite() {
            return Err(invalid(format!("s must be finite, got {}", self.s)));
        }
        if !(self.beta > 0.0) {
            return Err(invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if self.t_grid.is_empty()
            || self.t_grid[0] > 1.0
            || self.t_grid.windows(2).any(|w| !(w[1] < w[0]))
            || self.t_grid.iter().any(|&t| !(t > 0.0))
        {
            return Err(invalid("t grid must lie in (0, 1] and decrease strictly"));
        }
        Ok(())
    }

    /// Whether consecutive t-nodes are at most a quarter octave apart.
    pub fn t_grid_resolved(&self) -> bool {
        self.t_grid
            .windows(2)
            .all(|w| (w[0] / w[1]).log2() <= 1.0 / T_POINTS_PER_OCTAVE as f64 + 1e-12)
    }

    /// `a t > n` with `t < min(q-, beta)`, i.e. `a min(q-, beta) > n`.
    pub fn peetre_hypothesis_holds(&self) -> bool {
        let n = self.herz.spec().dimension() as f64;
        let t = self.peetre.t_integrability;
        t < self.herz.q.q_minus().min(self.beta) && self.peetre.a * t > n
    }
}

/// `(sum_j (c_j g_j(x))^beta)^(1/beta)` pointwise, or the max when
/// `beta = inf`. Terms are scaled by their pointwise maximum before powering.
pub fn ell_beta_combine(levels: &[Vec<f64>], weights: &[f64], beta: f64) -> Vec<f64> {
    let len = levels.first().map_or(0, Vec::len);
    (0..len)
        .into_par_iter()
        .map(|i| {
            let terms = levels.iter().zip(weights).map(|(g, c)| c * g[i]);
            if beta.is_infinite() {
                return terms.fold(0.0, f64::max);
            }
            let top = terms.clone().fold(0.0, f64::max);
            if top == 0.0 {
                return 0.0;
            }
            top * terms
                .map(|v| (v / top).powf(beta))
                .sum::<f64>()
                .powf(1.0 / beta)
        })
        .collect()
}

/// `2^(j s)` for `j = 0..levels`.
pub(crate) fn smoothness_weights(levels: usize, s: f64) -> Vec<f64> {
    (0..levels).map(|j| 2f64.powf(j as f64 * s)).collect()
}

/// Herz norm of the pointwise `l^beta` combination of `2^(js) |g_j|`.
pub fn tl_norm_of_levels(levels: &[Vec<f64>], params: &TLParams) -> Result<f64> {
    let weights = smoothness_weights(levels.len(), params.s);
    let field = ell_beta_combine(levels, &weights, params.beta);
    Ok(herz_norm_of_field(field, &params.herz)?.value)
}

fn require_kind(bank: &FilterBank, kind: BankKind) -> Result<()> {
    if bank.kind != kind {
        return Err(Error::FilterBank(format!(
            "expected {kind:?}, got {:?}",
            bank.kind
        )));
    }
    Ok(())
}

fn level_magnitudes(f: &SampledFunction, bank: &FilterBank) -> Result<Vec<Vec<f64>>> {
    Ok(bank
        .apply_all(f)?
        .into_iter()
        .map(|c| c.iter().map(|v| v.norm()).collect())
        .collect())
}

/// Filter-bank norm with a resolution of unity.
pub fn tl_norm(f: &SampledFunction, params: &TLParams) -> Result<f64> {
    require_kind(&params.bank, BankKind::ResolutionOfUnity)?;
    tl_norm_of_levels(&level_magnitudes(f, &params.bank)?, params)
}

/// Same expression with an admissible pair; level 0 is the low-pass `Phi`.
pub fn tl_norm_admissible(f: &SampledFunction, params: &TLParams) -> Result<f64> {
    require_kind(&params.bank, BankKind::AdmissiblePair)?;
    tl_norm_of_levels(&level_magnitudes(f, &params.bank)?, params)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeetreNorm {
    pub value: f64,
    /// `false` when `a t > n` fails for the configured `t`.
    pub hypothesis_holds: bool,
}

/// Peetre maximal functions `phi*_j^a f` in place of `|phi_j * f|`. Works
/// with either a resolution of unity or an admissible pair.
pub fn tl_norm_peetre(f: &SampledFunction, params: &TLParams) -> Result<PeetreNorm> {
    if params.bank.kind == BankKind::KernelFamily {
        return Err(Error::FilterBank(
            "Peetre norm expects a dyadic bank".into(),
        ));
    }
    let spec = params.bank.spec;
    let conv = params.bank.apply_all(f)?;
    let levels = conv
        .iter()
        .enumerate()
        .map(|(j, c)| peetre_of_field(&spec, c, j as i32, params.peetre.a))
        .collect::<Result<Vec<_>>>()?;
    Ok(PeetreNorm {
        value: tl_norm_of_levels(&levels, params)?,
        hypothesis_holds: params.peetre_hypothesis_holds(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_t_grid_is_quarter_octaves() {
        let t = default_t_grid(8);
        assert_eq!(t.len(), 36);
        assert_eq!(t[0], 1.0);
        assert!((t[4] - 0.5).abs() < 1e-15);
        assert!((t[35] - 2f64.powf(-8.75)).abs() < 1e-15);
    }

    #[test]
    fn ell_beta_matches_direct_sum() {
        let levels = vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![2.0, 3.0]];
        let w = [1.0, 0.5, 1.0];
        let out = ell_beta_combine(&levels, &w, 2.0);
        assert!((out[0] - 6f64.sqrt()).abs() < 1e-15);
        assert!((out[1] - 3.0).abs() < 1e-15);
        let out = ell_beta_combine(&levels, &w, f64::INFINITY);
        assert_eq!(out, vec![2.0, 3.0]);
    }
}
