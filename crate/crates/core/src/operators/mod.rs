//! Maximal operators, size-condition operators, vector-valued combinations
//! and the discrete convolution inequality for sequences of functions.

pub mod convolution_lemma;
pub mod maximal;
pub mod sublinear;
pub mod vector;

pub use convolution_lemma::{convolved_ell_beta, discrete_convolution_bound};
pub use maximal::{bump_domination, maximal, maximal_field, maximal_t, WindowFamily};
pub use sublinear::{size_condition_at, size_condition_operator, size_majorant, SizeKernel};
pub use vector::{ell_r_fields, vector_ell_r, VectorFunction};
