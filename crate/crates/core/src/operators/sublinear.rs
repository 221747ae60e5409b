//! Two concrete operators obeying the size condition
//! `|Tf(x)| <= C integral |x - y|^-n |f(y)| dy` off the support of `f`.
//!
//! Both kernels vanish for `|x - y| <= 2h`, which keeps the quadrature
//! finite and does not affect points farther than `2h` from the support.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fft;
use crate::grid::{GridSpec, SampledFunction};
use crate::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeKernel {
    /// `(x - y) / |x - y|^(n+1)`; first Riesz component in 2-D.
    RieszTruncated,
    /// `|x - y|^-n`.
    KernelPower,
}

impl SizeKernel {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "riesz_truncated" => Ok(Self::RieszTruncated),
            "kernel_power" => Ok(Self::KernelPower),
            other => Err(invalid(format!("unknown operator `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RieszTruncated => "riesz_truncated",
            Self::KernelPower => "kernel_power",
        }
    }

    /// Kernel at offset `d`, zero inside the truncation radius.
    pub fn eval(&self, spec: &GridSpec, d: [f64; 2]) -> f64 {
        let r = d[0].hypot(d[1]);
        if r <= truncation_radius(spec) {
            return 0.0;
        }
        let n = spec.dimension() as i32;
        match self {
            Self::RieszTruncated => d[0] / r.powi(n + 1),
            Self::KernelPower => r.powi(-n),
        }
    }
}

/// `2h`.
pub fn truncation_radius(spec: &GridSpec) -> f64 {
    2.0 * spec.step()
}

/// `Tf` on every grid point by zero-padded FFT convolution.
pub fn size_condition_operator(kind: SizeKernel, f: &SampledFunction) -> SampledFunction {
    let spec = *f.spec();
    let values = fft::linear_convolution(&spec, f.values(), |d| kind.eval(&spec, d));
    SampledFunction::new(spec, values, format!("{}[{}]", kind.name(), f.label()))
        .expect("convolution of finite data is finite")
}

/// `Tf(x)` at an arbitrary point by direct summation.
pub fn size_condition_at(kind: SizeKernel, f: &SampledFunction, x: [f64; 2]) -> Complex64 {
    let spec = f.spec();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, v) in f.values().iter().enumerate() {
        let y = spec.point(i);
        acc += v * kind.eval(spec, [x[0] - y[0], x[1] - y[1]]);
    }
    acc * spec.cell_volume()
}

/// The majorant `integral_(|x-y| > 2h) |x - y|^-n |f(y)| dy`.
pub fn size_majorant(f: &SampledFunction) -> Vec<f64> {
    let spec = *f.spec();
    let magnitudes: Vec<Complex64> = f
        .values()
        .iter()
        .map(|v| Complex64::new(v.norm(), 0.0))
        .collect();
    fft::linear_convolution(&spec, &magnitudes, |d| {
        SizeKernel::KernelPower.eval(&spec, d)
    })
    .into_iter()
    .map(|v| v.re.max(0.0))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn kernel_power_log_integral() {
        let g = make_grid(1, 4, 2048, -6, 4).unwrap();
        let chi = SampledFunction::from_real_fn(g, "chi", |x| {
            if (0.0..=1.0).contains(&x[0]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let t = size_condition_operator(SizeKernel::KernelPower, &chi);
        let i = ((4.0 + g.halfwidth()) / g.step()) as usize;
        let x = g.axis_coord(i);
        let exact = (x / (x - 1.0)).ln();
        assert!((t.values()[i].re - exact).abs() < 1e-3);
        assert!((exact - (4.0f64 / 3.0).ln()).abs() < 1e-2);
    }

    #[test]
    fn truncation_excludes_two_cells() {
        let g = make_grid(1, 2, 64, -2, 2).unwrap();
        let h = g.step();
        assert_eq!(SizeKernel::KernelPower.eval(&g, [2.0 * h, 0.0]), 0.0);
        assert!(SizeKernel::KernelPower.eval(&g, [3.0 * h, 0.0]) > 0.0);
    }

    #[test]
    fn parse_names() {
        assert_eq!(
            SizeKernel::parse("kernel_power").unwrap(),
            SizeKernel::KernelPower
        );
        assert!(SizeKernel::parse("hilbert").is_err());
    }
}
