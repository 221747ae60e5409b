//! Command-line experiments over the `herzlab` toolkit: configuration,
//! verification suites, constant estimates and their output files.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod estimate;
pub mod experiments;
pub mod input;
pub mod output;
pub mod suites;
pub mod svg;
