//! Finite-dimensional linear algebra on lattice windows.
//!
//! Everything the index computations need is here: shift matrices, Hermitian
//! eigendecomposition, heat traces, trace norms, exponentials, resolvent
//! entries of banded Hermitian matrices and the quadrature rules used as
//! independent oracles.

mod eigen;
mod matrix;
mod quadrature;
mod resolvent;

pub use eigen::{
    exp_difference_bound_check, expm_hermitian, heat_trace_diff, heat_trace_diff_from_spectra,
    hermitian_eig, hermitian_eigenvalues, operator_norm, singular_values, trace_norm,
    EigenDecomposition, HERMITIAN_TOL,
};
pub use matrix::{cyclic_shift, halfline_shift, Boundary, OperatorMatrix, Window};
pub use quadrature::{
    integrate_adaptive, semicircle_integral, QuadratureRule, SEMICIRCLE_GRID,
};
pub use resolvent::{bandwidth, resolvent_entry, BandedResolvent};
