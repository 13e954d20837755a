//! Fredholm and Witten indices of one-dimensional split-step quantum walks.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense operator matrices on lattice windows, Hermitian
//!   eigendecomposition, heat traces, trace norms, resolvent entries and
//!   quadrature rules.
//! - [`walk`]: coin sequences `a, b, p, q`, the walk operators `Γ, Γ′, U, Q`,
//!   the reduced supercharge `Q_ε0`, phase elimination and the cut-and-reduce
//!   pipeline onto two half-lines.
//! - [`halfline`]: the limiting symbols `F±`, their half-line realisations and
//!   the fourth-order pair `T`, `T0` with their rank-one difference.
//! - [`analytic`]: `H(z)`, `τ±`, the perturbation determinant of `(T, T0)` and
//!   the spectral shift function.
//! - [`index`]: the sign function and `W(r, s)`, Fredholm classification,
//!   Toeplitz winding numbers, heat-kernel Witten indices with extrapolation,
//!   and the Krein trace formula cross-check.

pub mod analytic;
pub mod error;
pub mod halfline;
pub mod index;
pub mod linalg;
pub mod walk;

pub use error::{Error, Result};
pub use num_complex::Complex64;
