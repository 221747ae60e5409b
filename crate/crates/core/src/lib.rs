//! Numerical toolkit for weighted grand Herz-Morrey spaces with variable
//! exponents and the Triebel-Lizorkin scale built on top of them.
//!
//! Everything is discretized on a uniform grid over `[-2^K, 2^K]^n`
//! (`n = 1` or `2`). Functions are piecewise constant on cells, integrals
//! use the rectangle rule and all convolutions with spectral filters are
//! periodic on the truncated domain. The modules build on each other in
//! this order:
//!
//! * [`grid`]: geometry, dyadic shells `D_k`, quadrature, sampled functions.
//! * [`exponent`], [`weight`]: variable exponents with log-Hölder
//!   diagnostics, weights and Muckenhoupt-type constants.
//! * [`lebesgue`]: modular, Luxemburg norm, weighted norm, Hölder check.
//! * [`herz`]: grand Herz-Morrey norm and its split form.
//! * [`operators`]: maximal operators, size-condition operators,
//!   vector-valued combinations, the discrete convolution lemma.
//! * [`littlewood_paley`]: filter banks, Calderón reconstruction, Peetre
//!   maximal functions, kernel families.
//! * [`spaces`]: Triebel-Lizorkin type norms and equivalence experiments.
//! * [`corpus`]: deterministic test-function families.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod exponent;
pub mod fft;
pub mod grid;
pub mod herz;
pub mod lebesgue;
pub mod littlewood_paley;
pub mod operators;
pub mod report;
pub mod spaces;
pub mod weight;

pub use error::{Error, Result};
pub use exponent::{ExponentFunction, ExponentProfile};
pub use grid::{GridSpec, MaskKind, SampledFunction};
pub use herz::{HerzNormBreakdown, HerzParams};
pub use report::{ConstantReport, SampleRatio};
pub use weight::Weight;

pub use num_complex::Complex64;
