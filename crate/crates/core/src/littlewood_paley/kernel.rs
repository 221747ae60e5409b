//! Kernel pair `k_0`, `k` with Tauberian and moment conditions, their
//! dilates `k_t` and the associated Peetre maximal functions.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::grid::{GridSpec, SampledFunction};
use crate::littlewood_paley::filters::{max_level, BankKind, BankMetadata, FilterBank};
use crate::littlewood_paley::peetre::weighted_sup;
use crate::Complex64;

pub const DEFAULT_EPSILON: f64 = 0.5;
pub const DEFAULT_MOMENT_ORDER: i32 = 1;

/// `k^(xi) = |xi/eps|^(2 m0) exp(1 - |xi/eps|^2)` and
/// `k_0^(xi) = exp(-|xi/eps|^2)` with `m0 = ceil((S + 1) / 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelProfile {
    pub epsilon: f64,
    pub moment_order: i32,
}

impl Default for KernelProfile {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            moment_order: DEFAULT_MOMENT_ORDER,
        }
    }
}

impl KernelProfile {
    /// Order of the zero of `k^` at the origin.
    pub fn zero_order(&self) -> i32 {
        2 * ((self.moment_order + 1 + 1) / 2).max(0)
    }

    pub fn k_hat(&self, r: f64) -> f64 {
        let s = r / self.epsilon;
        s.powi(self.zero_order()) * (1.0 - s * s).exp()
    }

    pub fn k0_hat(&self, r: f64) -> f64 {
        let s = r / self.epsilon;
        (-s * s).exp()
    }

    /// Multiplier of `k_t`, i.e. `k^(t xi)`.
    pub fn k_t_multiplier(&self, spec: &GridSpec, t: f64) -> Vec<f64> {
        fft::frequency_radii(spec)
            .into_iter()
            .map(|r| self.k_hat(t * r))
            .collect()
    }
}

/// Levels `k_0^`, `k^(2^-1 xi)`, ..., `k^(2^-j_max xi)`.
pub fn build_kernel_family(spec: &GridSpec, moment_order: i32, epsilon: f64) -> Result<FilterBank> {
    if moment_order < -1 {
        return Err(invalid(format!(
            "moment order must be >= -1, got {moment_order}"
        )));
    }
    if !(epsilon > 0.0) || 2.0 * epsilon >= spec.nyquist() {
        return Err(Error::FilterBank(format!(
            "epsilon = {epsilon} must be positive with 2 epsilon below the Nyquist frequency"
        )));
    }
    let j_max = max_level(spec);
    if j_max < 3 {
        return Err(Error::FilterBank(format!(
            "grid resolves only {j_max} dyadic levels, need at least 3"
        )));
    }
    let profile = KernelProfile {
        epsilon,
        moment_order,
    };
    let radii = fft::frequency_radii(spec);
    let mut levels = vec![radii.iter().map(|&r| profile.k0_hat(r)).collect()];
    for j in 1..=j_max {
        let s = 2f64.powi(-j);
        levels.push(radii.iter().map(|&r| profile.k_hat(s * r)).collect());
    }
    let supports = (0..=j_max)
        .map(|j| (epsilon * 2f64.powi(j - 1), epsilon * 2f64.powi(j + 1)))
        .collect();
    Ok(FilterBank {
        kind: BankKind::KernelFamily,
        spec: *spec,
        j_max,
        levels,
        duals: None,
        metadata: BankMetadata {
            profile: None,
            epsilon: Some(epsilon),
            moment_order: Some(moment_order),
            lower_bound: None,
            dual_denominator_min: None,
            supports,
        },
    })
}

pub fn kernel_profile(bank: &FilterBank) -> Result<KernelProfile> {
    match (bank.kind, bank.metadata.epsilon, bank.metadata.moment_order) {
        (BankKind::KernelFamily, Some(epsilon), Some(moment_order)) => Ok(KernelProfile {
            epsilon,
            moment_order,
        }),
        _ => Err(Error::FilterBank("not a kernel family".into())),
    }
}

/// Space-domain samples of the kernel with multiplier `m` (see
/// [`fft::kernel_samples`]).
pub fn kernel_in_space(spec: &GridSpec, multiplier: &[f64]) -> Vec<f64> {
    let m: Vec<Complex64> = multiplier.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::kernel_samples(spec, &m)
        .into_iter()
        .map(|v| v.re)
        .collect()
}

/// `k*_j^a f(x) = sup_y |k_j * f(x + y)| / (1 + 2^j |y|)^a`.
pub fn kernel_peetre(
    f: &SampledFunction,
    family: &FilterBank,
    j: i32,
    a: f64,
) -> Result<SampledFunction> {
    kernel_profile(family)?;
    let conv = family.apply(f, j)?;
    let magnitudes: Vec<f64> = conv.iter().map(|v| v.norm()).collect();
    let values = weighted_sup(&family.spec, &magnitudes, 2f64.powi(-j), a)?;
    SampledFunction::from_real(family.spec, values, format!("kpeetre{j}[{}]", f.label()))
}

/// `k*_t^a f(x) = sup_y |k_t * f(x + y)| / (1 + |y| / t)^a`.
pub fn kernel_peetre_t(
    f: &SampledFunction,
    family: &FilterBank,
    t: f64,
    a: f64,
) -> Result<SampledFunction> {
    let profile = kernel_profile(family)?;
    if !(t > 0.0) {
        return Err(invalid(format!("t must be positive, got {t}")));
    }
    let spec = family.spec;
    let conv = fft::apply_multiplier(
        &spec,
        f.values(),
        &profile
            .k_t_multiplier(&spec, t)
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect::<Vec<_>>(),
    );
    let magnitudes: Vec<f64> = conv.iter().map(|v| v.norm()).collect();
    let values = weighted_sup(&spec, &magnitudes, t, a)?;
    SampledFunction::from_real(spec, values, format!("kpeetre_t{t}[{}]", f.label()))
}
