//! Triebel-Lizorkin type spaces over the grand Herz-Morrey norm and their
//! equivalent characterizations.

pub mod equivalence;
pub mod kernel_norms;
pub mod tl;

pub use equivalence::equivalence_experiment;
pub use kernel_norms::{
    kernel_norms, local_means, log_trapezoid_weights, summarize_corpus, NormComparison, PairSpread,
    NORM_NAMES,
};
pub use tl::{
    default_t_grid, ell_beta_combine, tl_norm, tl_norm_admissible, tl_norm_of_levels,
    tl_norm_peetre, PeetreNorm, TLParams,
};
