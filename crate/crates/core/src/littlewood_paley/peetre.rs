//! Peetre-type maximal functions `sup_y |g(y)| (1 + |x - y| / scale)^-a`
//! taken exactly over all grid points, and the majorization by
//! `eta_(N,m) * |g|^r`.
//!
//! The sup is found by best-first search on a max pyramid: blocks are
//! opened in order of the bound `block max x weight at the nearest point`,
//! and the first leaf popped is the exact maximum.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::grid::{GridSpec, SampledFunction};
use crate::littlewood_paley::filters::{apply_real, BankKind, FilterBank};
use crate::report::{ConstantReport, SampleRatio};
use crate::Complex64;

/// Per-level block maxima; level `l` holds blocks of `2^l` cells per axis.
struct MaxPyramid {
    side: usize,
    dimension: usize,
    levels: Vec<Vec<f64>>,
}

impl MaxPyramid {
    fn new(spec: &GridSpec, values: &[f64]) -> Self {
        let side = spec.samples_per_axis();
        let dimension = spec.dimension();
        let mut levels = vec![values.to_vec()];
        let mut s = side;
        while s > 1 {
            let prev = levels.last().expect("nonempty");
            let half = s / 2;
            let next = if dimension == 1 {
                (0..half)
                    .map(|i| prev[2 * i].max(prev[2 * i + 1]))
                    .collect()
            } else {
                let mut v = vec![0.0; half * half];
                for j in 0..half {
                    for i in 0..half {
                        let a = prev[2 * j * s + 2 * i].max(prev[2 * j * s + 2 * i + 1]);
                        let b =
                            prev[(2 * j + 1) * s + 2 * i].max(prev[(2 * j + 1) * s + 2 * i + 1]);
                        v[j * half + i] = a.max(b);
                    }
                }
                v
            };
            levels.push(next);
            s = half;
        }
        Self {
            side,
            dimension,
            levels,
        }
    }

    /// Distance in cells from `p` to the block `[lo, lo + width)` on one axis.
    fn gap(p: usize, lo: usize, width: usize) -> usize {
        if p < lo {
            lo - p
        } else if p >= lo + width {
            p + 1 - lo - width
        } else {
            0
        }
    }

    fn block_max(&self, level: usize, bi: usize, bj: usize) -> f64 {
        if self.dimension == 1 {
            self.levels[level][bi]
        } else {
            self.levels[level][bj * (self.side >> level) + bi]
        }
    }

    /// Upper bound of `g w` on a block: block max times the weight at the
    /// block's nearest point.
    fn bound(&self, x: [usize; 2], level: usize, bi: usize, bj: usize, table: &[f64]) -> f64 {
        let width = 1usize << level;
        let dx = Self::gap(x[0], bi * width, width);
        let weight = if self.dimension == 1 {
            table[dx]
        } else {
            let dy = Self::gap(x[1], bj * width, width);
            table[dx * dx + dy * dy]
        };
        self.block_max(level, bi, bj) * weight
    }

    /// `max_y g(y) w(|x - y|)` with `w` tabulated by cell distance in 1-D and
    /// by squared cell distance in 2-D. Blocks are expanded in order of
    /// decreasing bound; the search stops when no open block can beat the
    /// best leaf.
    fn sup(&self, x: [usize; 2], table: &[f64]) -> f64 {
        let top = self.levels.len() - 1;
        let own = if self.dimension == 1 {
            x[0]
        } else {
            x[1] * self.side + x[0]
        };
        let mut best = self.levels[0][own];
        let mut heap = BinaryHeap::new();
        heap.push(Node {
            bound: self.bound(x, top, 0, 0, table),
            level: top,
            bi: 0,
            bj: 0,
        });
        let count = if self.dimension == 1 { 2 } else { 4 };
        while let Some(node) = heap.pop() {
            if node.bound <= best {
                break;
            }
            if node.level == 0 {
                best = node.bound;
                break;
            }
            let level = node.level - 1;
            for c in 0..count {
                let (bi, bj) = (2 * node.bi + (c & 1), 2 * node.bj + (c >> 1));
                let bound = self.bound(x, level, bi, bj, table);
                if bound > best {
                    heap.push(Node {
                        bound,
                        level,
                        bi,
                        bj,
                    });
                }
            }
        }
        best
    }
}

/// Open block of the best-first search, ordered by `bound`.
struct Node {
    bound: f64,
    level: usize,
    bi: usize,
    bj: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound)
    }
}

/// `sup_y |g(y)| (1 + |x - y| / scale)^-a` at every grid point.
pub fn weighted_sup(spec: &GridSpec, magnitudes: &[f64], scale: f64, a: f64) -> Result<Vec<f64>> {
    if !(a > 0.0) {
        return Err(invalid(format!("a must be positive, got {a}")));
    }
    if !(scale > 0.0) {
        return Err(invalid(format!("scale must be positive, got {scale}")));
    }
    let side = spec.samples_per_axis();
    let h = spec.step();
    let table: Vec<f64> = if spec.dimension() == 1 {
        (0..=side)
            .map(|d| (1.0 + d as f64 * h / scale).powf(-a))
            .collect()
    } else {
        (0..=2 * side * side)
            .map(|d2| (1.0 + (d2 as f64).sqrt() * h / scale).powf(-a))
            .collect()
    };
    let pyramid = MaxPyramid::new(spec, magnitudes);
    Ok((0..spec.len())
        .into_par_iter()
        .map(|idx| pyramid.sup(spec.unflatten(idx), &table))
        .collect())
}

/// `phi*_j^a f(x) = sup_y |phi_j * f(y)| / (1 + 2^j |x - y|)^a`.
pub fn peetre_maximal(
    f: &SampledFunction,
    bank: &FilterBank,
    j: i32,
    a: f64,
) -> Result<SampledFunction> {
    let conv = bank.apply(f, j)?;
    let magnitudes: Vec<f64> = conv.iter().map(|v| v.norm()).collect();
    let values = weighted_sup(&bank.spec, &magnitudes, 2f64.powi(-j), a)?;
    SampledFunction::from_real(bank.spec, values, format!("peetre{j}[{}]", f.label()))
}

/// Peetre maximal function of already convolved data at scale `2^-j`.
pub fn peetre_of_field(spec: &GridSpec, conv: &[Complex64], j: i32, a: f64) -> Result<Vec<f64>> {
    let magnitudes: Vec<f64> = conv.iter().map(|v| v.norm()).collect();
    weighted_sup(spec, &magnitudes, 2f64.powi(-j), a)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeetreParams {
    pub a: f64,
    /// Integrability index `r` of the majorization.
    pub t_integrability: f64,
    /// Decay order `m` of `eta_(N,m)`.
    pub m: f64,
}

impl PeetreParams {
    /// Whether `a r > n`.
    pub fn hypothesis_holds(&self, dimension: usize) -> bool {
        self.a * self.t_integrability > dimension as f64
    }
}

/// `(eta_(N,m) * |g|^r)^(1/r)` with `eta_(N,m)(x) = N^n (1 + N|x|)^-m`.
pub fn eta_average(spec: &GridSpec, g: &[Complex64], big_n: f64, r: f64, m: f64) -> Vec<f64> {
    let n = spec.dimension() as i32;
    let powered: Vec<Complex64> = g
        .iter()
        .map(|v| Complex64::new(v.norm().powf(r), 0.0))
        .collect();
    fft::linear_convolution(spec, &powered, |d| {
        big_n.powi(n) * (1.0 + big_n * d[0].hypot(d[1])).powf(-m)
    })
    .into_iter()
    .map(|v| v.re.max(0.0).powf(1.0 / r))
    .collect()
}

/// Ratios `|theta_R * omega_N * f| / (max{1, (N/R)^m} (eta_(N,m) * |omega_N * f|^r)^(1/r))`
/// with `theta = omega = phi`, `N = 2^j` and `R = 2^j'` for each `j'`.
/// Points where the right side is below `1e-10` of its maximum are skipped.
pub fn eta_majorization_check(
    f: &SampledFunction,
    bank: &FilterBank,
    j: i32,
    j_primes: &[i32],
    r: f64,
    m: f64,
) -> Result<ConstantReport> {
    if bank.kind != BankKind::ResolutionOfUnity {
        return Err(Error::FilterBank(
            "majorization uses a resolution of unity".into(),
        ));
    }
    if !(r > 0.0) || !(m > bank.spec.dimension() as f64) {
        return Err(invalid("need r > 0 and m > n"));
    }
    if j < 1 {
        return Err(invalid("level must be at least 1"));
    }
    let spec = bank.spec;
    let spectrum = fft::forward(&spec, f.values());
    let omega = bank.level(j)?;
    let inner = apply_real(&spec, &spectrum, omega);
    let big_n = 2f64.powi(j);
    let rhs_base = eta_average(&spec, &inner, big_n, r, m);
    let floor = 1e-10 * rhs_base.iter().cloned().fold(0.0, f64::max);
    let mut samples = Vec::new();
    for &jp in j_primes {
        let theta = bank.level(jp)?;
        let both: Vec<f64> = omega.iter().zip(theta).map(|(a, b)| a * b).collect();
        let lhs = apply_real(&spec, &spectrum, &both);
        let factor = (big_n / 2f64.powi(jp)).powf(m).max(1.0);
        let (mut l, mut rr, mut worst) = (0.0, 0.0, -1.0);
        for (a, b) in lhs.iter().zip(&rhs_base) {
            if *b > floor {
                let ratio = a.norm() / (factor * b);
                if ratio > worst {
                    worst = ratio;
                    l = a.norm();
                    rr = factor * b;
                }
            }
        }
        samples.push(SampleRatio::new(
            format!("{}:j={j},j'={jp}", f.label()),
            l,
            rr,
        ));
    }
    Ok(ConstantReport::from_samples("eta_majorization", samples))
}
