//! Periodic spectral machinery on the grid lattice.
//!
//! Filters are stored as Fourier multipliers: `phi * f` is computed as
//! `IFFT(m(xi) * FFT(f))`, which is the rectangle-rule periodic convolution
//! with the kernel whose transform is `m`. Angular frequencies follow
//! `xi = 2 pi k / L` with `L = 2^(K+1)` the period.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::GridSpec;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// In-place transform of an `n`-dimensional cube with `side` points per axis.
/// The inverse is normalized so that `inverse(forward(x)) == x`.
pub fn transform(data: &mut [Complex64], side: usize, dimension: usize, inverse: bool) {
    let fft = plan(side, inverse);
    match dimension {
        1 => fft.process(data),
        2 => {
            fft.process(data);
            let mut column = vec![Complex64::new(0.0, 0.0); side];
            for c in 0..side {
                for r in 0..side {
                    column[r] = data[r * side + c];
                }
                fft.process(&mut column);
                for r in 0..side {
                    data[r * side + c] = column[r];
                }
            }
        }
        _ => unreachable!("grids are 1-D or 2-D"),
    }
    if inverse {
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

pub fn forward(spec: &GridSpec, values: &[Complex64]) -> Vec<Complex64> {
    let mut data = values.to_vec();
    transform(&mut data, spec.samples_per_axis(), spec.dimension(), false);
    data
}

pub fn inverse(spec: &GridSpec, spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut data = spectrum.to_vec();
    transform(&mut data, spec.samples_per_axis(), spec.dimension(), true);
    data
}

/// Signed integer frequency of FFT bin `m` on an axis with `n` points.
fn signed_bin(m: usize, n: usize) -> f64 {
    if m < n / 2 {
        m as f64
    } else {
        m as f64 - n as f64
    }
}

/// Angular frequency vector of each lattice bin, in FFT order.
pub fn frequency_vectors(spec: &GridSpec) -> Vec<[f64; 2]> {
    let n = spec.samples_per_axis();
    let unit = 2.0 * std::f64::consts::PI / (2.0 * spec.halfwidth());
    (0..spec.len())
        .map(|idx| {
            let [i, j] = spec.unflatten(idx);
            if spec.dimension() == 1 {
                [unit * signed_bin(i, n), 0.0]
            } else {
                [unit * signed_bin(i, n), unit * signed_bin(j, n)]
            }
        })
        .collect()
}

/// `|xi|` of each lattice bin, in FFT order.
pub fn frequency_radii(spec: &GridSpec) -> Vec<f64> {
    frequency_vectors(spec)
        .into_iter()
        .map(|[a, b]| a.hypot(b))
        .collect()
}

/// Applies a multiplier to an already transformed signal and returns the
/// real-space result.
pub fn apply_to_spectrum(
    spec: &GridSpec,
    spectrum: &[Complex64],
    multiplier: &[Complex64],
) -> Vec<Complex64> {
    let product: Vec<Complex64> = spectrum
        .iter()
        .zip(multiplier)
        .map(|(a, b)| a * b)
        .collect();
    inverse(spec, &product)
}

pub fn apply_multiplier(
    spec: &GridSpec,
    values: &[Complex64],
    multiplier: &[Complex64],
) -> Vec<Complex64> {
    apply_to_spectrum(spec, &forward(spec, values), multiplier)
}

/// Samples at the grid points of the periodized kernel whose transform is
/// `multiplier`: `K(x_i) = L^-n sum_m K^(xi_m) e^(i xi_m x_i)`.
pub fn kernel_samples(spec: &GridSpec, multiplier: &[Complex64]) -> Vec<Complex64> {
    let x0 = spec.axis_coord(0);
    let shifted: Vec<Complex64> = frequency_vectors(spec)
        .into_iter()
        .zip(multiplier)
        .map(|([a, b], m)| {
            let phase = if spec.dimension() == 1 {
                a * x0
            } else {
                (a + b) * x0
            };
            m * Complex64::from_polar(1.0, phase)
        })
        .collect();
    let scale = 1.0 / spec.cell_volume();
    inverse(spec, &shifted)
        .into_iter()
        .map(|v| v * scale)
        .collect()
}

/// Non-periodic rectangle-rule convolution `h^n sum_j f_j K(x_i - x_j)` of
/// grid values with a kernel sampled at cell offsets, via zero padding.
///
/// `kernel` receives the offset vector `x_i - x_j` (second entry zero in
/// 1-D).
pub fn linear_convolution<K>(spec: &GridSpec, values: &[Complex64], kernel: K) -> Vec<Complex64>
where
    K: Fn([f64; 2]) -> f64,
{
    let n = spec.samples_per_axis();
    let m = 2 * n;
    let dim = spec.dimension();
    let h = spec.step();
    let padded_len = m.pow(dim as u32);
    let zero = Complex64::new(0.0, 0.0);

    let pad_index = |i: usize, j: usize| if dim == 1 { i } else { j * m + i };
    let mut signal = vec![zero; padded_len];
    for (idx, v) in values.iter().enumerate() {
        let [i, j] = spec.unflatten(idx);
        signal[pad_index(i, j)] = *v;
    }

    // Offsets d in (-n, n) wrap to d mod 2n; the bin at d = n stays zero.
    let offset = |b: usize| -> Option<f64> {
        if b < n {
            Some(b as f64 * h)
        } else if b > n {
            Some((b as f64 - m as f64) * h)
        } else {
            None
        }
    };
    let mut kern = vec![zero; padded_len];
    let cell = spec.cell_volume();
    for (idx, slot) in kern.iter_mut().enumerate() {
        let (bi, bj) = if dim == 1 {
            (idx, 0)
        } else {
            (idx % m, idx / m)
        };
        let dx = offset(bi);
        let dy = if dim == 1 { Some(0.0) } else { offset(bj) };
        if let (Some(dx), Some(dy)) = (dx, dy) {
            *slot = Complex64::new(cell * kernel([dx, dy]), 0.0);
        }
    }

    transform(&mut signal, m, dim, false);
    transform(&mut kern, m, dim, false);
    for (s, k) in signal.iter_mut().zip(&kern) {
        *s *= k;
    }
    transform(&mut signal, m, dim, true);

    (0..spec.len())
        .map(|idx| {
            let [i, j] = spec.unflatten(idx);
            signal[pad_index(i, j)]
        })
        .collect()
}
