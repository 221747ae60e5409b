//! Uncentered maximal operator over a family of grid-aligned windows.
//!
//! A window `(a, b)` at cell `i` covers cells `i - a ..= i + b`; in two
//! dimensions a window is a pair of such offsets with equal side lengths.
//! Cells outside the domain carry `f = 0` but still count in the average.
//! Window sums are assembled from dyadic block sums, so every partial sum
//! only mixes values inside its own window.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fft;
use crate::grid::{GridSpec, SampledFunction};
use crate::report::SampleRatio;
use crate::Complex64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowFamily {
    /// Cell offsets `(a, b)`; closed under swapping.
    offsets: Vec<(usize, usize)>,
}

impl WindowFamily {
    /// Offsets in `{0, 1, 2, 4, ..., 2^m <= max_offset}` on both sides.
    pub fn dyadic(max_offset: usize) -> Self {
        let mut values = vec![0usize];
        let mut v = 1usize;
        while v <= max_offset {
            values.push(v);
            v *= 2;
        }
        Self::from_values(&values)
    }

    /// Dyadic family reaching across the whole grid.
    pub fn default_for(spec: &GridSpec) -> Self {
        Self::dyadic(spec.samples_per_axis())
    }

    /// All pairs drawn from `values` on each side.
    pub fn from_values(values: &[usize]) -> Self {
        let mut vals = values.to_vec();
        vals.sort_unstable();
        vals.dedup();
        let offsets = vals
            .iter()
            .flat_map(|&a| vals.iter().map(move |&b| (a, b)))
            .collect();
        Self { offsets }
    }

    pub fn from_offsets(offsets: Vec<(usize, usize)>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(invalid("window family is empty"));
        }
        let mut sorted = offsets;
        sorted.sort_unstable();
        sorted.dedup();
        if sorted
            .iter()
            .any(|&(a, b)| sorted.binary_search(&(b, a)).is_err())
        {
            return Err(invalid("window family must be closed under swapping"));
        }
        Ok(Self { offsets: sorted })
    }

    pub fn offsets(&self) -> &[(usize, usize)] {
        &self.offsets
    }

    /// Union with another family.
    pub fn refined(&self, other: &WindowFamily) -> Self {
        let mut offsets = self.offsets.clone();
        offsets.extend_from_slice(&other.offsets);
        offsets.sort_unstable();
        offsets.dedup();
        Self { offsets }
    }

    fn max_offset(&self) -> usize {
        self.offsets
            .iter()
            .map(|&(a, b)| a.max(b))
            .max()
            .unwrap_or(0)
    }
}

/// Sums of every dyadic block of a zero-padded line.
struct BlockSums {
    pad: usize,
    levels: Vec<Vec<f64>>,
}

impl BlockSums {
    fn new(line: &[f64], pad: usize) -> Self {
        let len = line.len() + 2 * pad;
        let mut base = vec![0.0; len];
        base[pad..pad + line.len()].copy_from_slice(line);
        let mut levels = vec![base];
        let mut width = 1usize;
        while 2 * width <= pad.max(1) {
            let prev = levels.last().expect("nonempty");
            let next = (0..len)
                .map(|s| {
                    prev[s]
                        + if s + width < len {
                            prev[s + width]
                        } else {
                            0.0
                        }
                })
                .collect();
            levels.push(next);
            width *= 2;
        }
        Self { pad, levels }
    }

    /// Sum of `len` cells starting at padded position `start`.
    fn range(&self, mut start: usize, mut len: usize) -> f64 {
        let mut total = 0.0;
        while len > 0 {
            let m = usize::BITS - 1 - len.leading_zeros();
            total += self.levels[m as usize][start];
            start += 1 << m;
            len -= 1 << m;
        }
        total
    }

    /// Sum over cells `i - a ..= i + b` of the unpadded line.
    fn window(&self, i: usize, a: usize, b: usize) -> f64 {
        let c = i + self.pad;
        self.range(c - a, a) + self.levels[0][c] + self.range(c + 1, b)
    }
}

fn maximal_1d(values: &[f64], windows: &WindowFamily) -> Vec<f64> {
    let table = BlockSums::new(values, windows.max_offset());
    // Each side length is summed once per cell and shared by all windows.
    let mut sides: Vec<usize> = windows.offsets.iter().flat_map(|&(a, b)| [a, b]).collect();
    sides.sort_unstable();
    sides.dedup();
    let slot = |v: usize| sides.binary_search(&v).expect("side listed");
    let pairs: Vec<(usize, usize, f64)> = windows
        .offsets
        .iter()
        .map(|&(a, b)| (slot(a), slot(b), 1.0 / (a + b + 1) as f64))
        .collect();
    (0..values.len())
        .into_par_iter()
        .map_init(
            || (vec![0.0; sides.len()], vec![0.0; sides.len()]),
            |(left, right), i| {
                let c = i + table.pad;
                for (k, &len) in sides.iter().enumerate() {
                    left[k] = table.range(c - len, len);
                    right[k] = table.range(c + 1, len);
                }
                let centre = table.levels[0][c];
                pairs
                    .iter()
                    .map(|&(a, b, inv)| (left[a] + centre + right[b]) * inv)
                    .fold(0.0, f64::max)
            },
        )
        .collect()
}

fn maximal_2d(values: &[f64], side: usize, windows: &WindowFamily) -> Vec<f64> {
    let pad = windows.max_offset();
    let mut best = vec![0.0f64; values.len()];
    let mut by_width: Vec<(usize, usize)> = windows.offsets.clone();
    by_width.sort_by_key(|&(a, b)| (a + b, a));
    for &(a1, b1) in &windows.offsets {
        let width = a1 + b1;
        // Horizontal window sums along each row.
        let rows: Vec<Vec<f64>> = (0..side)
            .into_par_iter()
            .map(|j| {
                let table = BlockSums::new(&values[j * side..(j + 1) * side], pad);
                (0..side).map(|i| table.window(i, a1, b1)).collect()
            })
            .collect();
        let vertical: Vec<(usize, usize)> = by_width
            .iter()
            .copied()
            .filter(|&(a, b)| a + b == width)
            .collect();
        let area = ((width + 1) * (width + 1)) as f64;
        let columns: Vec<Vec<f64>> = (0..side)
            .into_par_iter()
            .map(|i| {
                let line: Vec<f64> = (0..side).map(|j| rows[j][i]).collect();
                let table = BlockSums::new(&line, pad);
                (0..side)
                    .map(|j| {
                        vertical
                            .iter()
                            .map(|&(a2, b2)| table.window(j, a2, b2) / area)
                            .fold(0.0, f64::max)
                    })
                    .collect()
            })
            .collect();
        for (i, col) in columns.iter().enumerate() {
            for (j, v) in col.iter().enumerate() {
                let slot = &mut best[j * side + i];
                *slot = slot.max(*v);
            }
        }
    }
    best
}

/// Maximal function of a nonnegative field.
pub fn maximal_field(spec: &GridSpec, values: &[f64], windows: &WindowFamily) -> Vec<f64> {
    match spec.dimension() {
        1 => maximal_1d(values, windows),
        _ => maximal_2d(values, spec.samples_per_axis(), windows),
    }
}

/// `Mf(x) = max over windows of the average of |f|`.
pub fn maximal(f: &SampledFunction, windows: &WindowFamily) -> SampledFunction {
    let values = maximal_field(f.spec(), &f.abs(), windows);
    SampledFunction::from_real(*f.spec(), values, format!("M[{}]", f.label()))
        .expect("averages of finite values are finite")
}

/// `M_t f = (M(|f|^t))^(1/t)`.
pub fn maximal_t(f: &SampledFunction, t: f64, windows: &WindowFamily) -> Result<SampledFunction> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("t must be positive, got {t}")));
    }
    let powered: Vec<f64> = f.abs().iter().map(|v| v.powf(t)).collect();
    let values = maximal_field(f.spec(), &powered, windows)
        .into_iter()
        .map(|v| v.powf(1.0 / t))
        .collect();
    SampledFunction::from_real(*f.spec(), values, format!("M_{t}[{}]", f.label()))
}

/// Spectrum of the bump `pi^(-n/2) exp(-|x|^2)` dilated to `N^n w(N x)`.
pub fn bump_multiplier(spec: &GridSpec, n_scale: f64) -> Vec<Complex64> {
    fft::frequency_radii(spec)
        .into_iter()
        .map(|r| {
            let s = r / n_scale;
            Complex64::new((-s * s / 4.0).exp(), 0.0)
        })
        .collect()
}

/// Worst pointwise ratio `|w_N * f| / Mf` over `N = 2^level`, one sample
/// per level. Points where `Mf` is below `1e-10 max Mf` are skipped.
pub fn bump_domination(
    f: &SampledFunction,
    windows: &WindowFamily,
    levels: &[i32],
) -> Vec<SampleRatio> {
    let spec = f.spec();
    let mf = maximal_field(spec, &f.abs(), windows);
    let floor = 1e-10 * mf.iter().cloned().fold(0.0, f64::max);
    let spectrum = fft::forward(spec, f.values());
    levels
        .iter()
        .map(|&level| {
            let smoothed =
                fft::apply_to_spectrum(spec, &spectrum, &bump_multiplier(spec, 2f64.powi(level)));
            let (mut lhs, mut rhs, mut worst) = (0.0, 1.0, 0.0);
            for (s, m) in smoothed.iter().zip(&mf) {
                if *m > floor && s.norm() / m > worst {
                    worst = s.norm() / m;
                    lhs = s.norm();
                    rhs = *m;
                }
            }
            SampleRatio::new(format!("{}:N=2^{level}", f.label()), lhs, rhs)
        })
        .collect()
}
