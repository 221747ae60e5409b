//! Uniform grids over `[-2^K, 2^K]^n`, dyadic balls and annuli, and the
//! sampled-function type every other module consumes.
//!
//! Samples sit at cell centers `x_i = -2^K + (i + 1/2) h`, so the origin is
//! never a grid point. In two dimensions cells are stored row-major with
//! the first axis varying fastest.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    dimension: usize,
    halfwidth_log2: i32,
    samples_per_axis: usize,
    k_min: i32,
    k_max: i32,
}

impl GridSpec {
    pub fn new(
        dimension: usize,
        halfwidth_log2: i32,
        samples_per_axis: usize,
        k_min: i32,
        k_max: i32,
    ) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dimension}"
            )));
        }
        if samples_per_axis < 2 || !samples_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "samples per axis must be a power of two >= 2, got {samples_per_axis}"
            )));
        }
        if k_max > halfwidth_log2 {
            return Err(Error::InvalidGrid(format!(
                "k_max = {k_max} exceeds K = {halfwidth_log2}"
            )));
        }
        if !(k_min < 0 && 0 < k_max) {
            return Err(Error::InvalidGrid(format!(
                "need k_min < 0 < k_max, got [{k_min}, {k_max}]"
            )));
        }
        Ok(Self {
            dimension,
            halfwidth_log2,
            samples_per_axis,
            k_min,
            k_max,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn halfwidth_log2(&self) -> i32 {
        self.halfwidth_log2
    }

    pub fn samples_per_axis(&self) -> usize {
        self.samples_per_axis
    }

    pub fn k_min(&self) -> i32 {
        self.k_min
    }

    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    pub fn halfwidth(&self) -> f64 {
        2f64.powi(self.halfwidth_log2)
    }

    /// Grid step `h = 2^(K+1) / N`.
    pub fn step(&self) -> f64 {
        2.0 * self.halfwidth() / self.samples_per_axis as f64
    }

    /// Total number of cells, `N^n`.
    pub fn len(&self) -> usize {
        self.samples_per_axis.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.step().powi(self.dimension as i32)
    }

    pub fn axis_coord(&self, i: usize) -> f64 {
        -self.halfwidth() + (i as f64 + 0.5) * self.step()
    }

    /// Axis indices of a flat cell index.
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        let n = self.samples_per_axis;
        if self.dimension == 1 {
            [idx, 0]
        } else {
            [idx % n, idx / n]
        }
    }

    pub fn flatten(&self, ix: [usize; 2]) -> usize {
        if self.dimension == 1 {
            ix[0]
        } else {
            ix[1] * self.samples_per_axis + ix[0]
        }
    }

    /// Coordinates of a cell center; the second entry is zero in 1-D.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [i, j] = self.unflatten(idx);
        if self.dimension == 1 {
            [self.axis_coord(i), 0.0]
        } else {
            [self.axis_coord(i), self.axis_coord(j)]
        }
    }

    pub fn norm_at(&self, idx: usize) -> f64 {
        let [x, y] = self.point(idx);
        x.hypot(y)
    }

    /// Smallest `k` with `|x| <= 2^k`, i.e. the annulus `D_k` containing the
    /// cell center.
    pub fn shell_index(&self, idx: usize) -> i32 {
        shell_of_radius(self.norm_at(idx))
    }

    /// Shell index of every cell.
    pub fn shell_indices(&self) -> Vec<i32> {
        (0..self.len()).map(|i| self.shell_index(i)).collect()
    }

    /// Cell indices grouped by annulus, for `k` in `k_min..=k_max`.
    pub fn shell_partition(&self) -> Vec<Vec<usize>> {
        let count = (self.k_max - self.k_min + 1) as usize;
        let mut shells = vec![Vec::new(); count];
        for idx in 0..self.len() {
            let k = self.shell_index(idx);
            if (self.k_min..=self.k_max).contains(&k) {
                shells[(k - self.k_min) as usize].push(idx);
            }
        }
        shells
    }

    /// Highest frequency resolved by the lattice, `pi / h`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.step()
    }
}

pub fn make_grid(
    dimension: usize,
    halfwidth_log2: i32,
    samples_per_axis: usize,
    k_min: i32,
    k_max: i32,
) -> Result<GridSpec> {
    GridSpec::new(dimension, halfwidth_log2, samples_per_axis, k_min, k_max)
}

/// Annulus index of a radius: the smallest integer `k` with `r <= 2^k`.
pub fn shell_of_radius(r: f64) -> i32 {
    if r <= 0.0 {
        return i32::MIN;
    }
    let mut k = r.log2().ceil() as i32;
    if 2f64.powi(k - 1) >= r {
        k -= 1;
    }
    if 2f64.powi(k) < r {
        k += 1;
    }
    k
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    spec: GridSpec,
    values: Vec<Complex64>,
    label: String,
}

impl SampledFunction {
    pub fn new(spec: GridSpec, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(invalid(format!(
                "expected {} samples, got {}",
                spec.len(),
                values.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            spec,
            values,
            label: label.into(),
        })
    }

    pub fn from_real(spec: GridSpec, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        Self::new(
            spec,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            label,
        )
    }

    pub fn zeros(spec: GridSpec, label: impl Into<String>) -> Self {
        Self {
            spec,
            values: vec![Complex64::new(0.0, 0.0); spec.len()],
            label: label.into(),
        }
    }

    /// Samples a real function of the cell-center coordinates (a slice of
    /// length `n`).
    pub fn from_real_fn<F>(spec: GridSpec, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let n = spec.dimension();
        let values = (0..spec.len())
            .map(|i| {
                let p = spec.point(i);
                Complex64::new(f(&p[..n]), 0.0)
            })
            .collect();
        Self::new(spec, values, label)
    }

    pub fn from_complex_fn<F>(spec: GridSpec, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let n = spec.dimension();
        let values = (0..spec.len())
            .map(|i| {
                let p = spec.point(i);
                f(&p[..n])
            })
            .collect();
        Self::new(spec, values, label)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|&v| f(v)).collect(),
            label: self.label.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Pointwise product with a real field of the same grid.
    pub fn mul_real(&self, field: &[f64]) -> Result<Self> {
        if field.len() != self.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            spec: self.spec,
            values: self.values.iter().zip(field).map(|(v, w)| v * w).collect(),
            label: self.label.clone(),
        })
    }

    pub fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            spec: self.spec,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            label: self.label.clone(),
        })
    }

    /// Cyclic shift by `cells` along the first axis.
    pub fn shifted(&self, cells: isize) -> Self {
        let n = self.spec.samples_per_axis() as isize;
        let mut values = self.values.clone();
        for (idx, v) in values.iter_mut().enumerate() {
            let [i, j] = self.spec.unflatten(idx);
            let src = (i as isize - cells).rem_euclid(n) as usize;
            *v = self.values[self.spec.flatten([src, j])];
        }
        Self {
            spec: self.spec,
            values,
            label: self.label.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskKind {
    /// `chi_k`, the indicator of `D_k = B_k \ B_(k-1)`.
    Annulus,
    /// Indicator of `B_k = {|x| <= 2^k}`.
    Ball,
    /// `chi~_m`: `chi_m` for `m >= 1` and `chi_(B_0)` for `m = 0`.
    Modified,
}

/// Indicator of a dyadic annulus, ball or modified annulus, sampled at cell
/// centers.
pub fn dyadic_mask(spec: &GridSpec, k: i32, kind: MaskKind) -> Result<SampledFunction> {
    let (lo, hi) = match kind {
        MaskKind::Annulus => (spec.k_min(), spec.k_max()),
        MaskKind::Ball => (spec.k_min() - 1, spec.k_max()),
        MaskKind::Modified => (0, spec.k_max()),
    };
    if k < lo || k > hi {
        return Err(Error::IndexOutOfRange { k, lo, hi });
    }
    let outer = 2f64.powi(k);
    let inner = 2f64.powi(k - 1);
    let member = |r: f64| match kind {
        MaskKind::Ball => r <= outer,
        MaskKind::Annulus => inner < r && r <= outer,
        MaskKind::Modified if k == 0 => r <= outer,
        MaskKind::Modified => inner < r && r <= outer,
    };
    let values = (0..spec.len())
        .map(|i| {
            if member(spec.norm_at(i)) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    SampledFunction::new(*spec, values, format!("{kind:?}({k})").to_lowercase())
}

pub fn annulus_mask(spec: &GridSpec, k: i32) -> Result<SampledFunction> {
    dyadic_mask(spec, k, MaskKind::Annulus)
}

pub fn ball_mask(spec: &GridSpec, k: i32) -> Result<SampledFunction> {
    dyadic_mask(spec, k, MaskKind::Ball)
}

/// Cells whose centers satisfy `|x - center| <= radius`, in storage order.
pub fn ball_cells(spec: &GridSpec, center: [f64; 2], radius: f64) -> Vec<usize> {
    let n = spec.samples_per_axis();
    let h = spec.step();
    let a = spec.halfwidth();
    let range = |c: f64| {
        let lo = ((c - radius + a) / h - 1.0).floor().max(0.0) as usize;
        let hi = (((c + radius + a) / h).ceil().max(0.0) as usize).min(n - 1);
        lo..=hi
    };
    let mut cells = Vec::new();
    if spec.dimension() == 1 {
        for i in range(center[0]) {
            if (spec.axis_coord(i) - center[0]).abs() <= radius {
                cells.push(i);
            }
        }
    } else {
        for j in range(center[1]) {
            let dy = spec.axis_coord(j) - center[1];
            for i in range(center[0]) {
                let dx = spec.axis_coord(i) - center[0];
                if dx.hypot(dy) <= radius {
                    cells.push(spec.flatten([i, j]));
                }
            }
        }
    }
    cells
}

/// Rectangle-rule integral `h^n * sum(values)` of the real part.
pub fn integrate(f: &SampledFunction) -> f64 {
    f.spec().cell_volume() * f.values().iter().map(|v| v.re).sum::<f64>()
}

/// Rectangle-rule integral of a real field on `spec`.
pub fn integrate_field(spec: &GridSpec, field: &[f64]) -> f64 {
    spec.cell_volume() * field.iter().sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> GridSpec {
        make_grid(1, 6, 16384, -20, 6).unwrap()
    }

    #[test]
    fn grid_step_and_cell_count() {
        let g = line();
        assert_eq!(g.step(), 2f64.powi(-7));
        let g2 = make_grid(2, 4, 256, -8, 4).unwrap();
        assert_eq!(g2.len(), 65536);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            make_grid(1, 0, 2, 0, 1),
            Err(Error::InvalidGrid(_))
        ));
        assert!(make_grid(1, 6, 1000, -4, 6).is_err());
        assert!(make_grid(1, 6, 1024, -4, 7).is_err());
        assert!(make_grid(3, 6, 1024, -4, 6).is_err());
    }

    #[test]
    fn shell_index_boundaries() {
        assert_eq!(shell_of_radius(1.0), 0);
        assert_eq!(shell_of_radius(0.5000001), 0);
        assert_eq!(shell_of_radius(0.5), -1);
        assert_eq!(shell_of_radius(3.0), 2);
        assert_eq!(shell_of_radius(2f64.powi(-8)), -8);
    }

    #[test]
    fn annulus_zero_marks_half_to_one() {
        let g = line();
        let m = annulus_mask(&g, 0).unwrap();
        for i in 0..g.len() {
            let x = g.axis_coord(i).abs();
            let expect = if 0.5 < x && x <= 1.0 { 1.0 } else { 0.0 };
            assert_eq!(m.values()[i].re, expect);
        }
        assert!((integrate(&m) - 1.0).abs() <= g.step());
    }

    #[test]
    fn annuli_partition_the_top_ball() {
        let g = make_grid(1, 6, 4096, -12, 6).unwrap();
        let mut total = ball_mask(&g, g.k_min() - 1).unwrap().real_parts();
        for k in g.k_min()..=g.k_max() {
            let a = annulus_mask(&g, k).unwrap();
            for (t, v) in total.iter_mut().zip(a.values()) {
                *t += v.re;
            }
        }
        let top = ball_mask(&g, g.k_max()).unwrap();
        for (t, b) in total.iter().zip(top.values()) {
            assert_eq!(*t, b.re);
        }
    }

    #[test]
    fn annuli_are_disjoint_and_telescoping() {
        let g = make_grid(2, 3, 64, -4, 3).unwrap();
        for k in g.k_min()..=g.k_max() {
            let a = annulus_mask(&g, k).unwrap();
            let b = ball_mask(&g, k).unwrap();
            let b1 = ball_mask(&g, k - 1).unwrap();
            for i in 0..g.len() {
                assert_eq!(a.values()[i].re, b.values()[i].re - b1.values()[i].re);
            }
            for k2 in g.k_min()..=g.k_max() {
                if k2 != k {
                    let c = annulus_mask(&g, k2).unwrap();
                    assert!(a
                        .values()
                        .iter()
                        .zip(c.values())
                        .all(|(x, y)| x.re * y.re == 0.0));
                }
            }
        }
    }

    #[test]
    fn modified_mask_zero_is_unit_ball() {
        let g = make_grid(1, 4, 512, -6, 4).unwrap();
        let m0 = dyadic_mask(&g, 0, MaskKind::Modified).unwrap();
        assert_eq!(m0.values(), ball_mask(&g, 0).unwrap().values());
        let m2 = dyadic_mask(&g, 2, MaskKind::Modified).unwrap();
        assert_eq!(m2.values(), annulus_mask(&g, 2).unwrap().values());
        assert!(annulus_mask(&g, 5).is_err());
    }

    #[test]
    fn quadrature_examples() {
        let g = line();
        let one = SampledFunction::from_real_fn(g, "one", |_| 1.0).unwrap();
        assert!((integrate(&one) - 128.0).abs() <= g.step());
        let ind = SampledFunction::from_real_fn(g, "chi", |x| {
            if (0.0..=1.0).contains(&x[0]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert!((integrate(&ind) - 1.0).abs() <= g.step());
    }

    #[test]
    fn rejects_non_finite_samples() {
        let g = make_grid(1, 2, 8, -2, 2).unwrap();
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert_eq!(
            SampledFunction::from_real(g, v, "x"),
            Err(Error::NonFinite(3))
        );
    }
}
