use faer::{Mat, Side};
use num_complex::Complex64;

use super::OperatorMatrix;
use crate::{Error, Result};

/// Hermiticity tolerance relative to `max(1, max|M_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: Mat<Complex64>,
}

impl EigenDecomposition {
    /// `V diag(f(λ)) V*`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> Complex64) -> Mat<Complex64> {
        let v = &self.eigenvectors;
        let n = v.nrows();
        let fl: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let scaled = Mat::from_fn(n, n, |i, k| v[(i, k)] * fl[k]);
        &scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> Mat<Complex64> {
        self.apply_fn(|l| Complex64::new(l, 0.0))
    }
}

fn check_hermitian(m: &OperatorMatrix) -> Result<()> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

fn real_part(m: &OperatorMatrix) -> Mat<f64> {
    let e = m.entries();
    Mat::from_fn(e.nrows(), e.ncols(), |i, j| e[(i, j)].re)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Ascending eigenvalues of a Hermitian matrix.
///
/// Real symmetric input takes the cheaper real path.
pub fn hermitian_eigenvalues(m: &OperatorMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let values = if m.is_real() {
        real_part(m).self_adjoint_eigenvalues(Side::Lower)
    } else {
        m.entries().self_adjoint_eigenvalues(Side::Lower)
    };
    values.map(sorted).map_err(|_| Error::NoConvergence)
}

pub fn hermitian_eig(m: &OperatorMatrix) -> Result<EigenDecomposition> {
    check_hermitian(m)?;
    let n = m.dim();
    let (values, vectors) = if m.is_real() {
        let evd = real_part(m).self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
        let s = evd.S().column_vector();
        let u = evd.U();
        (
            (0..n).map(|i| s[i]).collect::<Vec<_>>(),
            Mat::from_fn(n, n, |i, j| Complex64::new(u[(i, j)], 0.0)),
        )
    } else {
        let evd = m.entries().self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
        let s = evd.S().column_vector();
        ((0..n).map(|i| s[i].re).collect::<Vec<_>>(), evd.U().to_owned())
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    Ok(EigenDecomposition {
        eigenvalues: order.iter().map(|&k| values[k]).collect(),
        eigenvectors: Mat::from_fn(n, n, |i, j| vectors[(i, order[j])]),
    })
}

/// `Σ_k (e^{-t λ_k(M1)} - e^{-t λ_k(M0)})` from ascending spectra.
///
/// Terms are paired by rank so that the bulk cancels before summation.
pub fn heat_trace_diff_from_spectra(l1: &[f64], l0: &[f64], t: f64) -> Result<f64> {
    if l1.len() != l0.len() {
        return Err(Error::DimensionMismatch { left: l1.len(), right: l0.len() });
    }
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    Ok(l1.iter().zip(l0).map(|(&a, &b)| (-t * a).exp() - (-t * b).exp()).sum())
}

/// `Tr e^{-t M1} - Tr e^{-t M0}` for Hermitian `M1`, `M0`.
pub fn heat_trace_diff(m1: &OperatorMatrix, m0: &OperatorMatrix, t: f64) -> Result<f64> {
    m1.check_same_dim(m0)?;
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    heat_trace_diff_from_spectra(&hermitian_eigenvalues(m1)?, &hermitian_eigenvalues(m0)?, t)
}

pub fn singular_values(m: &OperatorMatrix) -> Result<Vec<f64>> {
    let e = m.entries();
    let imaginary = (0..m.dim()).all(|j| (0..m.dim()).all(|i| e[(i, j)].re == 0.0));
    let sv = if m.is_real() {
        real_part(m).singular_values()
    } else if imaginary {
        // Singular values are unchanged by the unit factor -i.
        Mat::from_fn(e.nrows(), e.ncols(), |i, j| e[(i, j)].im).singular_values()
    } else {
        m.entries().singular_values()
    };
    sv.map(sorted).map_err(|_| Error::NoConvergence)
}

/// Sum of singular values.
pub fn trace_norm(m: &OperatorMatrix) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}

/// Largest singular value.
pub fn operator_norm(m: &OperatorMatrix) -> Result<f64> {
    Ok(singular_values(m)?.last().copied().unwrap_or(0.0))
}

/// `e^{zH}` for Hermitian `H`.
pub fn expm_hermitian(h: &OperatorMatrix, z: Complex64) -> Result<OperatorMatrix> {
    let evd = hermitian_eig(h)?;
    OperatorMatrix::new(evd.apply_fn(|l| (z * l).exp()), h.boundary(), h.window())
}

/// Returns `(‖e^{zH1} - e^{zH0}‖₁, |z| e^{|z|M} ‖H1 - H0‖₁)` with
/// `M = max(‖H1‖, ‖H0‖)`.
pub fn exp_difference_bound_check(
    h1: &OperatorMatrix,
    h0: &OperatorMatrix,
    z: Complex64,
) -> Result<(f64, f64)> {
    h1.check_same_dim(h0)?;
    let lhs = trace_norm(&(&expm_hermitian(h1, z)? - &expm_hermitian(h0, z)?))?;
    let big = operator_norm(h1)?.max(operator_norm(h0)?);
    let rhs = z.norm() * (z.norm() * big).exp() * trace_norm(&(h1 - h0))?;
    Ok((lhs, rhs))
}
