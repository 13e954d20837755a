use faer::Mat;
use num_complex::Complex64;

use super::WalkCoefficients;
use crate::linalg::{hermitian_eig, Boundary, OperatorMatrix, Window};
use crate::{Error, Result};

/// Eigenvalues of `Γ` must lie this close to `±1`.
pub const EIGENSPACE_TOL: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Clone, Debug)]
pub struct WalkOperators {
    pub gamma: OperatorMatrix,
    pub gamma_prime: OperatorMatrix,
    pub u: OperatorMatrix,
    pub q: OperatorMatrix,
}

/// Neighbour of `x` at offset `d`: wrapped on cyclic windows, `None` when it
/// leaves a truncated window.
fn neighbour(boundary: Boundary, window: Window, x: i64, d: i64) -> Option<i64> {
    match boundary {
        Boundary::Cyclic => Some(window.wrap(x + d)),
        _ => Some(x + d).filter(|&y| window.contains(y)),
    }
}

fn check_even(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: n });
    }
    if n % 2 != 0 {
        return Err(Error::OddWindow(n));
    }
    Ok(())
}

/// `Γ, Γ′, U = ΓΓ′` and `Q = (U - U*)/(2i)` on the centred window of `n`
/// sites, with basis ordered as (upper component, lower component).
///
/// On a cyclic window the coefficient sequence is read at wrapped sites, so
/// `Γ² = Γ′² = 1` and `ΓUΓ = U*` hold to rounding. Truncated full-line
/// windows are accepted for gauge and spectral comparisons; the identities
/// then fail at the two boundary sites.
pub fn build_walk(c: &WalkCoefficients, n: usize, boundary: Boundary) -> Result<WalkOperators> {
    check_even(n)?;
    if boundary == Boundary::HalfLineTruncated {
        return Err(Error::Boundary { boundary: boundary.name(), operation: "build_walk" });
    }
    let w = Window::spinor(-((n / 2) as i64), n);
    let idx = |comp: usize, x: i64| w.index(comp, x).expect("site in window");

    let mut gamma = OperatorMatrix::zeros(boundary, w);
    let mut gamma_prime = OperatorMatrix::zeros(boundary, w);
    for x in w.sites_iter() {
        let s = c.site(x);
        gamma.set(idx(0, x), idx(0, x), re(s.p));
        let prev = match boundary {
            Boundary::Cyclic => w.wrap(x - 1),
            _ => x - 1,
        };
        gamma.set(idx(1, x), idx(1, x), re(-c.p(prev)));
        if let Some(y) = neighbour(boundary, w, x, 1) {
            // (qLψ)(x) = q(x)ψ(x+1) and its adjoint L*q*.
            gamma.set(idx(0, x), idx(1, y), s.q);
            gamma.set(idx(1, y), idx(0, x), s.q.conj());
        }
        gamma_prime.set(idx(0, x), idx(0, x), re(s.a));
        gamma_prime.set(idx(0, x), idx(1, x), s.b.conj());
        gamma_prime.set(idx(1, x), idx(0, x), s.b);
        gamma_prime.set(idx(1, x), idx(1, x), re(-s.a));
    }
    let u = &gamma * &gamma_prime;
    let q = (&u - &u.adjoint()).scale(Complex64::new(0.0, -0.5));
    Ok(WalkOperators { gamma, gamma_prime, u, q })
}

/// The reduced supercharge `Q_ε0` on the centred window of `n` sites (or
/// sites `0..n` for a half-line window); tridiagonal.
///
/// Entries, with `θ = arg q`:
/// - `(x, x+1)`: `(i/2) √(1+p(x)) e^{iθ(x)} b(x+1) √(1+p(x+1))`
/// - `(x, x-1)`: `-(i/2) √(1-p(x)) b(x)* e^{-iθ(x-1)} √(1-p(x-1))`
/// - `(x, x)`: `-(i/2) |q(x)| (a(x) + a(x+1))`
///
/// With this placement of `b` and `b*` the singular values coincide with
/// those of the off-diagonal block of `Q` for arbitrary complex `b, q`.
pub fn build_qe0(c: &WalkCoefficients, n: usize, boundary: Boundary) -> Result<OperatorMatrix> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: n });
    }
    let w = match boundary {
        Boundary::HalfLineTruncated => Window::half_line(n),
        _ => Window::centered(n),
    };
    let half = I * 0.5;
    let mut m = OperatorMatrix::zeros(boundary, w);
    let idx = |x: i64| w.index(0, x).expect("site in window");
    let wrap_site = |x: i64| if boundary == Boundary::Cyclic { w.wrap(x) } else { x };
    for x in w.sites_iter() {
        let s = c.site(x);
        let i = idx(x);
        let next = c.site(wrap_site(x + 1));
        let prev = c.site(wrap_site(x - 1));
        let diag = -half * s.q.norm() * (s.a + next.a);
        let cur = m.get(i, i);
        m.set(i, i, cur + diag);
        if let Some(y) = neighbour(boundary, w, x, 1) {
            let v = half
                * (1.0 + s.p).sqrt()
                * Complex64::from_polar(1.0, s.q.arg())
                * next.b
                * (1.0 + next.p).sqrt();
            let cur = m.get(i, idx(y));
            m.set(i, idx(y), cur + v);
        }
        if let Some(y) = neighbour(boundary, w, x, -1) {
            let v = -half
                * (1.0 - s.p).sqrt()
                * s.b.conj()
                * Complex64::from_polar(1.0, -prev.q.arg())
                * (1.0 - prev.p).sqrt();
            let cur = m.get(i, idx(y));
            m.set(i, idx(y), cur + v);
        }
    }
    Ok(m)
}

/// Off-diagonal block `Q0 : ker(Γ-1) → ker(Γ+1)` in orthonormal eigenbases.
#[derive(Clone, Debug)]
pub struct ChiralBlock {
    pub q0: OperatorMatrix,
    pub k_plus: usize,
    pub k_minus: usize,
}

/// Extracts `Q0` from `Q` using the eigenvectors of `Γ`. Requires equal
/// eigenspace dimensions, which holds on cyclic windows.
pub fn chiral_block_extract(gamma: &OperatorMatrix, q: &OperatorMatrix) -> Result<ChiralBlock> {
    gamma.check_same_dim(q)?;
    let evd = hermitian_eig(gamma)?;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (k, &l) in evd.eigenvalues.iter().enumerate() {
        if (l - 1.0).abs() < EIGENSPACE_TOL {
            plus.push(k);
        } else if (l + 1.0).abs() < EIGENSPACE_TOL {
            minus.push(k);
        } else {
            return Err(Error::NotInvolution { tol: EIGENSPACE_TOL, deviation: (l.abs() - 1.0).abs() });
        }
    }
    if plus.len() != minus.len() {
        return Err(Error::UnbalancedChirality { plus: plus.len(), minus: minus.len() });
    }
    let n = gamma.dim();
    let v = &evd.eigenvectors;
    let basis = |cols: &[usize]| Mat::from_fn(n, cols.len(), |i, j| v[(i, cols[j])]);
    let (vp, vm) = (basis(&plus), basis(&minus));
    let block = vm.adjoint() * q.entries() * &vp;
    let k = plus.len();
    let q0 = OperatorMatrix::new(block, gamma.boundary(), Window::scalar(0, k))?;
    Ok(ChiralBlock { q0, k_plus: k, k_minus: minus.len() })
}
