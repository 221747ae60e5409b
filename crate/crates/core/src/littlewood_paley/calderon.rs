//! Reproducing formula `f = Phi~ * Psi * f + sum_k phi~_k * psi_k * f`,
//! in convolution form and in sampled (coefficient) form.

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{GridSpec, SampledFunction};
use crate::littlewood_paley::filters::{apply_real, BankKind, FilterBank};
use crate::Complex64;

/// Largest relative spectral energy allowed above `2^j_max`.
pub const SPILLOVER_TOLERANCE: f64 = 1e-16;

#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub function: SampledFunction,
    /// Relative spectral energy above `2^j_max`.
    pub spillover: f64,
}

fn dual_levels(bank: &FilterBank) -> Result<&[Vec<f64>]> {
    if bank.kind != BankKind::AdmissiblePair {
        return Err(Error::FilterBank(
            "reconstruction needs an admissible pair".into(),
        ));
    }
    bank.duals
        .as_deref()
        .ok_or_else(|| Error::FilterBank("admissible pair has no dual".into()))
}

/// Relative energy of `f^` at `|xi| > 2^j_max`.
pub fn spillover_energy(spec: &GridSpec, spectrum: &[Complex64], j_max: i32) -> f64 {
    let band = 2f64.powi(j_max);
    let (mut outside, mut total) = (0.0, 0.0);
    for (v, r) in spectrum.iter().zip(fft::frequency_radii(spec)) {
        let e = v.norm_sqr();
        total += e;
        if r > band {
            outside += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

/// Sum of the per-level terms `conj(phi_k^) psi_k^ f^`, each inverted
/// separately.
pub fn calderon_reconstruct(f: &SampledFunction, bank: &FilterBank) -> Result<Reconstruction> {
    let duals = dual_levels(bank)?;
    let spec = bank.spec;
    if *f.spec() != spec {
        return Err(Error::GridMismatch);
    }
    let spectrum = fft::forward(&spec, f.values());
    let spillover = spillover_energy(&spec, &spectrum, bank.j_max);
    if spillover > SPILLOVER_TOLERANCE {
        return Err(Error::BandLimit(spillover));
    }
    let mut sum = vec![Complex64::new(0.0, 0.0); spec.len()];
    for (phi, psi) in bank.levels.iter().zip(duals) {
        let m: Vec<f64> = phi.iter().zip(psi).map(|(a, b)| a * b).collect();
        for (s, v) in sum.iter_mut().zip(apply_real(&spec, &spectrum, &m)) {
            *s += v;
        }
    }
    Ok(Reconstruction {
        function: SampledFunction::new(spec, sum, format!("calderon[{}]", f.label()))?,
        spillover,
    })
}

/// Sampled form: the coefficients `phi~_k * f` on the lattice `2^-k Z^n`
/// (shifted to cell centers) are resynthesized with `psi_k`.
///
/// With `stride = 2^-k / h` cells, the impulse train carries
/// `stride^n (phi~_k * f)(x_m)` and is filtered by `psi_k^`. Levels finer
/// than the grid use every cell.
pub fn calderon_reconstruct_sampled(
    f: &SampledFunction,
    bank: &FilterBank,
) -> Result<Reconstruction> {
    let duals = dual_levels(bank)?;
    let spec = bank.spec;
    if *f.spec() != spec {
        return Err(Error::GridMismatch);
    }
    let spectrum = fft::forward(&spec, f.values());
    let spillover = spillover_energy(&spec, &spectrum, bank.j_max);
    if spillover > SPILLOVER_TOLERANCE {
        return Err(Error::BandLimit(spillover));
    }
    let n = spec.dimension() as i32;
    let zero = Complex64::new(0.0, 0.0);
    let mut sum = vec![zero; spec.len()];
    for (k, (phi, psi)) in bank.levels.iter().zip(duals).enumerate() {
        let coeffs = apply_real(&spec, &spectrum, phi);
        if coeffs.iter().all(|c| *c == zero) {
            continue;
        }
        let stride = (2f64.powi(-(k as i32)) / spec.step()).max(1.0) as usize;
        let scale = (stride as f64).powi(n);
        let train: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let [i, j] = spec.unflatten(idx);
                if i % stride == 0 && j % stride == 0 {
                    c * scale
                } else {
                    zero
                }
            })
            .collect();
        let train_hat = fft::forward(&spec, &train);
        for (s, v) in sum.iter_mut().zip(apply_real(&spec, &train_hat, psi)) {
            *s += v;
        }
    }
    Ok(Reconstruction {
        function: SampledFunction::new(spec, sum, format!("calderon_sampled[{}]", f.label()))?,
        spillover,
    })
}

/// `||a - b||_2 / ||b||_2`, or `||a||_2` when `b = 0`.
pub fn relative_l2_error(a: &SampledFunction, b: &SampledFunction) -> f64 {
    let diff: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    let base: f64 = b.values().iter().map(|v| v.norm_sqr()).sum();
    if base == 0.0 {
        diff.sqrt()
    } else {
        (diff / base).sqrt()
    }
}
