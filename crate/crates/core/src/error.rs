use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { min: usize, got: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("window of {0} sites must be even")]
    OddWindow(usize),

    #[error("matrix is not Hermitian (max |M - M*| = {0:e})")]
    NotHermitian(f64),

    #[error("heat-kernel time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("t = {t} exceeds the propagation bound {bound} for this truncation")]
    PropagationBound { t: f64, bound: f64 },

    #[error("time grid must be ascending with at least two points")]
    BadTimeGrid,

    #[error("singular system at z = {0}")]
    Singular(Complex64),

    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("{identity} violated at site {site}: residual {residual:e}")]
    Unitarity {
        identity: &'static str,
        site: i64,
        residual: f64,
    },

    #[error("{0} lies on the branch cut (-inf, 0]")]
    BranchCut(Complex64),

    #[error("H(z) is undefined on [-2, 2], got z = {0}")]
    OnInterval(Complex64),

    #[error("z = {0} lies on [0, inf); use the boundary value instead")]
    OnSpectrum(Complex64),

    #[error("x = {0} is a region breakpoint")]
    Breakpoint(f64),

    #[error("{name} = {value} is out of range ({expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("symbol vanishes on the unit circle (min modulus {0:e})")]
    VanishingSymbol(f64),

    #[error("unsupported boundary {boundary} for {operation}")]
    Boundary {
        boundary: &'static str,
        operation: &'static str,
    },

    #[error("window [{start}, {end}) does not contain the cut between -1 and 0")]
    CutOutsideWindow { start: i64, end: i64 },

    #[error("matrix couples the two half-lines (max entry {0:e})")]
    NotBlockDiagonal(f64),

    #[error("shift length m must be nonzero")]
    ZeroShift,

    #[error("chirality spectrum not within {tol:e} of +-1 (worst deviation {deviation:e})")]
    NotInvolution { tol: f64, deviation: f64 },

    #[error("chiral eigenspaces have unequal dimensions {plus} and {minus}")]
    UnbalancedChirality { plus: usize, minus: usize },

    #[error("square form requires |a| = |p| < 1, got a = {a}, p = {p}")]
    NotGapless { a: f64, p: f64 },

    #[error("parity conjugation mismatch (max deviation {0:e})")]
    ParityMismatch(f64),

    #[error("geometric amplitude {amplitude} exceeds bound {bound} for limit {limit}")]
    AmplitudeTooLarge {
        amplitude: f64,
        bound: f64,
        limit: f64,
    },
}
