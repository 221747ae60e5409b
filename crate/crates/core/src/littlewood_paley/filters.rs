//! Radial spectral filter banks on the frequency lattice of a grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{GridSpec, SampledFunction};
use crate::Complex64;

/// Highest level whose dilated bump is still represented:
/// `ceil(log2(pi / h)) - 1`.
pub fn max_level(spec: &GridSpec) -> i32 {
    spec.nyquist().log2().ceil() as i32 - 1
}

/// Smooth monotone step: `0` for `s <= 0`, `1` for `s >= 1`,
/// `e^(-1/s) / (e^(-1/s) + e^(-1/(1-s)))` in between.
pub fn glue(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

/// Radial low-pass bump: `1` on `[0, plateau]`, `0` beyond `cutoff`, with the
/// glue (optionally composed with `s^skew`) in between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub plateau: f64,
    pub cutoff: f64,
    pub skew: f64,
}

impl Default for BumpProfile {
    fn default() -> Self {
        Self {
            plateau: 1.0,
            cutoff: 2.0,
            skew: 1.0,
        }
    }
}

impl BumpProfile {
    /// Alternate profile used to test independence of the decomposition.
    pub fn alternate() -> Self {
        Self {
            plateau: 1.2,
            cutoff: 1.8,
            skew: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.plateau > 0.0 && self.plateau < self.cutoff && self.cutoff <= 2.0) {
            return Err(Error::FilterBank(format!(
                "need 0 < plateau < cutoff <= 2, got {} and {}",
                self.plateau, self.cutoff
            )));
        }
        if !(self.skew > 0.0) {
            return Err(Error::FilterBank("skew must be positive".into()));
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> f64 {
        let s = (r - self.plateau) / (self.cutoff - self.plateau);
        1.0 - glue(s.clamp(0.0, 1.0).powf(self.skew))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BankKind {
    ResolutionOfUnity,
    AdmissiblePair,
    KernelFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BankMetadata {
    pub profile: Option<BumpProfile>,
    /// Tauberian scale of a kernel family.
    pub epsilon: Option<f64>,
    /// Moment order `S` of a kernel family.
    pub moment_order: Option<i32>,
    /// Lower bound of the generators on their core sets.
    pub lower_bound: Option<f64>,
    /// Minimum of the dual denominator over the lattice.
    pub dual_denominator_min: Option<f64>,
    /// Radial support `[lo, hi]` of each level.
    pub supports: Vec<(f64, f64)>,
}

impl BankMetadata {
    fn empty() -> Self {
        Self {
            profile: None,
            epsilon: None,
            moment_order: None,
            lower_bound: None,
            dual_denominator_min: None,
            supports: Vec::new(),
        }
    }
}

/// Real radial multipliers, one per level `0..=j_max`, sampled on the FFT
/// lattice. An admissible pair also carries its dual levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterBank {
    pub kind: BankKind,
    pub spec: GridSpec,
    pub j_max: i32,
    pub levels: Vec<Vec<f64>>,
    pub duals: Option<Vec<Vec<f64>>>,
    pub metadata: BankMetadata,
}

impl FilterBank {
    pub fn level(&self, j: i32) -> Result<&[f64]> {
        self.levels
            .get(usize::try_from(j).map_err(|_| self.out_of_range(j))?)
            .map(Vec::as_slice)
            .ok_or_else(|| self.out_of_range(j))
    }

    fn out_of_range(&self, j: i32) -> Error {
        Error::IndexOutOfRange {
            k: j,
            lo: 0,
            hi: self.j_max,
        }
    }

    /// `phi_j * f` for every level, sharing one forward transform.
    pub fn apply_all(&self, f: &SampledFunction) -> Result<Vec<Vec<Complex64>>> {
        if *f.spec() != self.spec {
            return Err(Error::GridMismatch);
        }
        let spectrum = fft::forward(&self.spec, f.values());
        Ok(self
            .levels
            .iter()
            .map(|m| apply_real(&self.spec, &spectrum, m))
            .collect())
    }

    pub fn apply(&self, f: &SampledFunction, j: i32) -> Result<Vec<Complex64>> {
        if *f.spec() != self.spec {
            return Err(Error::GridMismatch);
        }
        let m = self.level(j)?;
        Ok(apply_real(
            &self.spec,
            &fft::forward(&self.spec, f.values()),
            m,
        ))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::FilterBank(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bank: Self =
            serde_json::from_str(text).map_err(|e| Error::FilterBank(e.to_string()))?;
        let expected = (bank.j_max + 1) as usize;
        if bank.levels.len() != expected || bank.levels.iter().any(|l| l.len() != bank.spec.len()) {
            return Err(Error::FilterBank(
                "level arrays do not match the grid".into(),
            ));
        }
        Ok(bank)
    }
}

pub(crate) fn apply_real(
    spec: &GridSpec,
    spectrum: &[Complex64],
    multiplier: &[f64],
) -> Vec<Complex64> {
    let product: Vec<Complex64> = spectrum
        .iter()
        .zip(multiplier)
        .map(|(a, m)| a * m)
        .collect();
    fft::inverse(spec, &product)
}

fn require_levels(spec: &GridSpec) -> Result<i32> {
    let j_max = max_level(spec);
    if j_max < 3 {
        return Err(Error::FilterBank(format!(
            "grid resolves only {j_max} dyadic levels, need at least 3"
        )));
    }
    Ok(j_max)
}

pub fn build_resolution_of_unity(spec: &GridSpec) -> Result<FilterBank> {
    build_resolution_of_unity_with(spec, BumpProfile::default())
}

/// `phi_0 = bump`, `phi_j(xi) = bump(2^-j xi) - bump(2^(1-j) xi)`; the levels
/// telescope to `bump(2^-j_max xi)`, which is `1` on the resolved band.
pub fn build_resolution_of_unity_with(spec: &GridSpec, profile: BumpProfile) -> Result<FilterBank> {
    profile.validate()?;
    let j_max = require_levels(spec)?;
    let radii = fft::frequency_radii(spec);
    let mut levels = Vec::with_capacity(j_max as usize + 1);
    let mut supports = Vec::with_capacity(j_max as usize + 1);
    levels.push(radii.iter().map(|&r| profile.eval(r)).collect());
    supports.push((0.0, profile.cutoff));
    for j in 1..=j_max {
        let s = 2f64.powi(-j);
        levels.push(
            radii
                .iter()
                .map(|&r| profile.eval(s * r) - profile.eval(2.0 * s * r))
                .collect(),
        );
        supports.push((
            profile.plateau * 2f64.powi(j - 1),
            profile.cutoff * 2f64.powi(j),
        ));
    }
    Ok(FilterBank {
        kind: BankKind::ResolutionOfUnity,
        spec: *spec,
        j_max,
        levels,
        duals: None,
        metadata: BankMetadata {
            profile: Some(profile),
            supports,
            ..BankMetadata::empty()
        },
    })
}

/// Generator of the admissible pair: `1` on `[3/5, 5/3]`, supported in
/// `[1/2, 2]`.
pub fn admissible_phi_hat(r: f64) -> f64 {
    if r <= 0.5 || r >= 2.0 {
        0.0
    } else if r < 0.6 {
        glue((r - 0.5) / 0.1)
    } else if r <= 5.0 / 3.0 {
        1.0
    } else {
        1.0 - glue((r - 5.0 / 3.0) / (1.0 / 3.0))
    }
}

/// Low-pass companion: `1` on `[0, 5/3]`, supported in `[0, 2]`.
pub fn admissible_big_phi_hat(r: f64) -> f64 {
    if r <= 5.0 / 3.0 {
        1.0
    } else {
        1.0 - glue((r - 5.0 / 3.0) / (1.0 / 3.0))
    }
}

/// Levels `Phi`, `phi(2^-1 xi)`, ..., `phi(2^-j_max xi)`.
pub fn build_admissible_pair(spec: &GridSpec) -> Result<FilterBank> {
    let j_max = require_levels(spec)?;
    let radii = fft::frequency_radii(spec);
    let mut levels = vec![radii.iter().map(|&r| admissible_big_phi_hat(r)).collect()];
    let mut supports = vec![(0.0, 2.0)];
    for j in 1..=j_max {
        let s = 2f64.powi(-j);
        levels.push(radii.iter().map(|&r| admissible_phi_hat(s * r)).collect());
        supports.push((2f64.powi(j - 1), 2f64.powi(j + 1)));
    }
    Ok(FilterBank {
        kind: BankKind::AdmissiblePair,
        spec: *spec,
        j_max,
        levels,
        duals: None,
        metadata: BankMetadata {
            lower_bound: Some(1.0),
            supports,
            ..BankMetadata::empty()
        },
    })
}

/// Smallest admissible value of the dual denominator.
pub const DUAL_DENOMINATOR_FLOOR: f64 = 1e-3;

/// Divides every level by `G = sum_levels |level|^2`, so that
/// `sum conj(level) * dual = 1` on the lattice.
pub fn build_admissible_dual(pair: &FilterBank) -> Result<FilterBank> {
    if pair.kind != BankKind::AdmissiblePair {
        return Err(Error::FilterBank("dual requires an admissible pair".into()));
    }
    let len = pair.spec.len();
    let denom: Vec<f64> = (0..len)
        .map(|i| pair.levels.iter().map(|l| l[i] * l[i]).sum())
        .collect();
    let min = denom.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min >= DUAL_DENOMINATOR_FLOOR) {
        return Err(Error::FilterBank(format!(
            "pair is not admissible on this lattice: min G = {min:e}"
        )));
    }
    let duals = pair
        .levels
        .iter()
        .map(|l| l.iter().zip(&denom).map(|(v, g)| v / g).collect())
        .collect();
    let mut bank = pair.clone();
    bank.duals = Some(duals);
    bank.metadata.dual_denominator_min = Some(min);
    Ok(bank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn default_grid_levels() {
        let g = make_grid(1, 6, 16384, -20, 6).unwrap();
        assert_eq!(max_level(&g), 8);
        assert!(build_resolution_of_unity(&make_grid(1, 2, 16, -2, 2).unwrap()).is_err());
    }

    #[test]
    fn glue_is_symmetric() {
        for s in [0.1, 0.25, 0.4] {
            assert!((glue(s) + glue(1.0 - s) - 1.0).abs() < 1e-15);
        }
        assert_eq!(glue(0.5), 0.5);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let g = make_grid(1, 3, 256, -4, 3).unwrap();
        let bank = build_admissible_dual(&build_admissible_pair(&g).unwrap()).unwrap();
        let back = FilterBank::from_json(&bank.to_json().unwrap()).unwrap();
        assert_eq!(bank, back);
    }

    #[test]
    fn dual_rejects_other_banks() {
        let g = make_grid(1, 3, 256, -4, 3).unwrap();
        assert!(build_admissible_dual(&build_resolution_of_unity(&g).unwrap()).is_err());
    }
}
