//! Split-step walk operators and the cut-and-reduce pipeline.

mod coefficients;
mod gauge;
mod operators;
mod reduction;

pub use coefficients::{
    validate_coefficients, AnisotropicLimits, DecayAmplitudes, Profile, SiteValues,
    WalkCoefficients, UNITARITY_TOL,
};
pub use gauge::{apply_gauge, gauge_unitary, phase_elimination, walk_phase_elimination, GaugePair};
pub use operators::{
    build_qe0, build_walk, chiral_block_extract, ChiralBlock, WalkOperators, EIGENSPACE_TOL,
};
pub use reduction::{
    limit_operator, reassemble, reduction_residual, reindex_halflines, split_at_origin,
};
