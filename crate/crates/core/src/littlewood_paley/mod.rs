//! Spectral filter banks: resolutions of unity, admissible pairs with their
//! duals, kernel families, the reproducing formula and Peetre maximal
//! functions.
//!
//! Every filter is a real radial multiplier on the FFT lattice, so
//! `phi~ = conj(phi(-.))` has the same multiplier as `phi`.

pub mod calderon;
pub mod filters;
pub mod kernel;
pub mod peetre;

pub use calderon::{
    calderon_reconstruct, calderon_reconstruct_sampled, relative_l2_error, spillover_energy,
    Reconstruction,
};
pub use filters::{
    admissible_big_phi_hat, admissible_phi_hat, build_admissible_dual, build_admissible_pair,
    build_resolution_of_unity, build_resolution_of_unity_with, glue, max_level, BankKind,
    BankMetadata, BumpProfile, FilterBank,
};
pub use kernel::{
    build_kernel_family, kernel_in_space, kernel_peetre, kernel_peetre_t, kernel_profile,
    KernelProfile,
};
pub use peetre::{
    eta_average, eta_majorization_check, peetre_maximal, peetre_of_field, weighted_sup,
    PeetreParams,
};
