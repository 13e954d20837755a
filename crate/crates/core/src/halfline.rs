//! Limiting half-line operators.
//!
//! The plus side of the walk reduces to `F₊(v*)` and the minus side to
//! `F₋(v)` on `ℓ²(ℤ≥0)`, where `v` is the unilateral right shift and
//! `F(X) = (i/2)[(1+p)b X - (1-p)b X* - 2qa]` with the side's limits.
//! In the gapless case `|a| = |p| < 1` the products `F*F`, `FF*` are affine
//! in the pentadiagonal operators
//! `T(A, P) = (v + v* + 2AP/(1-P²))² + (2/(1-P))Ω₀` and `T₀(A, P)` (no `Ω₀`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{halfline_shift, Boundary, OperatorMatrix, Window};
use crate::walk::AnisotropicLimits;
use crate::{Error, Result};

const GAPLESS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

/// Which product of `F` with its adjoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Product {
    /// `F*F`
    StarF,
    /// `FF*`
    FStar,
}

/// Limit symbol of one side in gauge-fixed form (`b, q ≥ 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FSymbol {
    pub side: Side,
    pub a: f64,
    pub p: f64,
    pub b: f64,
    pub q: f64,
}

impl FSymbol {
    pub fn new(side: Side, a: f64, p: f64) -> Self {
        FSymbol {
            side,
            a,
            p,
            b: (1.0 - a * a).max(0.0).sqrt(),
            q: (1.0 - p * p).max(0.0).sqrt(),
        }
    }

    pub fn from_limits(limits: &AnisotropicLimits, side: Side) -> Self {
        let s = match side {
            Side::Plus => limits.plus(),
            Side::Minus => limits.minus(),
        };
        FSymbol { side, a: s.a, p: s.p, b: s.b.norm(), q: s.q.norm() }
    }

    pub fn is_gapless(&self) -> bool {
        (self.a.abs() - self.p.abs()).abs() <= GAPLESS_TOL && self.p.abs() < 1.0
    }

    /// Coefficients `(c_X, c_{X*}, c_1)` of `F(X) = c_X X + c_{X*} X* + c_1`.
    fn coefficients(&self) -> (Complex64, Complex64, Complex64) {
        let half = Complex64::new(0.0, 0.5);
        (
            half * ((1.0 + self.p) * self.b),
            half * (-(1.0 - self.p) * self.b),
            half * (-2.0 * self.q * self.a),
        )
    }
}

/// `F(z) = (i/2)[(1+p)b z - (1-p)b z̄ - 2qa]`.
pub fn f_symbol_eval(s: &FSymbol, z: Complex64) -> Complex64 {
    let (cx, cxs, c1) = s.coefficients();
    cx * z + cxs * z.conj() + c1
}

/// `F₊(v*)` or `F₋(v)` on sites `0..n`, cut off at the far edge.
pub fn build_f_halfline(s: &FSymbol, n: usize) -> Result<OperatorMatrix> {
    if n < 4 {
        return Err(Error::DimensionTooSmall { min: 4, got: n });
    }
    let (cx, cxs, c1) = s.coefficients();
    // v sits on the subdiagonal, v* on the superdiagonal.
    let (sup, sub) = match s.side {
        Side::Plus => (cx, cxs),
        Side::Minus => (cxs, cx),
    };
    Ok(OperatorMatrix::from_fn(Boundary::HalfLineTruncated, Window::half_line(n), |i, j| {
        if i == j {
            c1
        } else if j == i + 1 {
            sup
        } else if i == j + 1 {
            sub
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Projection `Ω₀` onto `δ₀` on sites `0..n`.
pub fn omega0(n: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(Boundary::HalfLineTruncated, Window::half_line(n), |i, j| {
        Complex64::new(if i == 0 && j == 0 { 1.0 } else { 0.0 }, 0.0)
    })
}

/// Coefficient of `Ω₀` (inside the bracket `1/4[…]`) for each side and
/// product: `-(1±p)²b²`.
fn omega_sign(side: Side, which: Product) -> f64 {
    match (side, which) {
        (Side::Plus, Product::StarF) | (Side::Minus, Product::FStar) => 1.0,
        (Side::Plus, Product::FStar) | (Side::Minus, Product::StarF) => -1.0,
    }
}

/// Expanded product
/// `(1/4)[-b²(1-p²)(v²+v*²) - 4abpq(v+v*) + 2b²(1+p²) + 4a²q² - b²(1±p)²Ω₀]`.
pub fn product_closed_form(s: &FSymbol, which: Product, n: usize) -> Result<OperatorMatrix> {
    if n < 4 {
        return Err(Error::DimensionTooSmall { min: 4, got: n });
    }
    let (a, b, p, q) = (s.a, s.b, s.p, s.q);
    let b2 = b * b;
    let sign = omega_sign(s.side, which);
    let second = -b2 * (1.0 - p * p) / 4.0;
    let first = -a * b * p * q;
    let diag = (2.0 * b2 * (1.0 + p * p) + 4.0 * a * a * q * q) / 4.0;
    let corner = -b2 * (1.0 + sign * p).powi(2) / 4.0;
    Ok(OperatorMatrix::from_fn(Boundary::HalfLineTruncated, Window::half_line(n), |i, j| {
        let v = match i.abs_diff(j) {
            0 => diag + if i == 0 { corner } else { 0.0 },
            1 => first,
            2 => second,
            _ => 0.0,
        };
        Complex64::new(v, 0.0)
    }))
}

/// Completed-square form `1 - α_p[(v+v* + 2ap/(1-p²))² + c Ω₀]`, valid when
/// `|a| = |p| < 1`, with `c = 2/(1∓p)` depending on side and product.
pub fn product_square_form(s: &FSymbol, which: Product, n: usize) -> Result<OperatorMatrix> {
    if !s.is_gapless() {
        return Err(Error::NotGapless { a: s.a, p: s.p });
    }
    let params = table_params(s, which)?;
    let t = build_t(&params, true, n)?;
    Ok(t.scale_real(-params.alpha_p()).shift_diagonal(Complex64::new(1.0, 0.0)))
}

/// Parameters `(A, P)` with `F-product = 1 - α_P T(A, P)`:
/// plus `F*F` ↦ `(a, p)`, plus `FF*` ↦ `(-a, -p)`, minus `F*F` ↦ `(-a, -p)`,
/// minus `FF*` ↦ `(a, p)`.
pub fn table_params(s: &FSymbol, which: Product) -> Result<HalfLineParams> {
    let sign = omega_sign(s.side, which);
    HalfLineParams::with_a(sign * s.a, sign * s.p)
}

/// `P` together with the offset parameter `A` of `T(A, P)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfLineParams {
    pub p: f64,
    pub a: f64,
}

impl HalfLineParams {
    /// `A = -P`, for which the quadratic offset is `-2m_P`.
    pub fn new(p: f64) -> Result<Self> {
        Self::with_a(-p, p)
    }

    pub fn with_a(a: f64, p: f64) -> Result<Self> {
        if !(p.abs() < 1.0) {
            return Err(Error::OutOfRange { name: "P", value: p, expected: "(-1, 1)" });
        }
        if !(a.abs() < 1.0) {
            return Err(Error::OutOfRange { name: "A", value: a, expected: "(-1, 1)" });
        }
        Ok(HalfLineParams { p, a })
    }

    /// `m_P = P²/(1-P²)`.
    pub fn m_p(&self) -> f64 {
        self.p * self.p / (1.0 - self.p * self.p)
    }

    /// `α_P = (1-P²)²/4`.
    pub fn alpha_p(&self) -> f64 {
        (1.0 - self.p * self.p).powi(2) / 4.0
    }

    /// `2AP/(1-P²)`.
    pub fn offset(&self) -> f64 {
        2.0 * self.a * self.p / (1.0 - self.p * self.p)
    }

    /// Weight `2/(1-P)` of the rank-one term.
    pub fn rank_one_weight(&self) -> f64 {
        2.0 / (1.0 - self.p)
    }

    /// Upper edge `α_P⁻¹ = 4(1+m_P)²` of the essential spectrum of `T`.
    pub fn edge(&self) -> f64 {
        4.0 * (1.0 + self.m_p()).powi(2)
    }
}

/// `T(A, P)` (with `Ω₀` term) or `T₀(A, P)` on sites `0..n`.
///
/// The square is taken of the truncated `v + v* + c`, so the far corner
/// carries `c² + 1` instead of `c² + 2`.
pub fn build_t(params: &HalfLineParams, with_rank_one: bool, n: usize) -> Result<OperatorMatrix> {
    if n < 4 {
        return Err(Error::DimensionTooSmall { min: 4, got: n });
    }
    let c = params.offset();
    let mut t = OperatorMatrix::from_fn(Boundary::HalfLineTruncated, Window::half_line(n), |i, j| {
        let v = match i.abs_diff(j) {
            0 if i == 0 || i == n - 1 => c * c + 1.0,
            0 => c * c + 2.0,
            1 => 2.0 * c,
            2 => 1.0,
            _ => 0.0,
        };
        Complex64::new(v, 0.0)
    });
    if with_rank_one {
        t.set(0, 0, t.get(0, 0) + params.rank_one_weight());
    }
    Ok(t)
}

/// Checks `W T(A, P) W⁻¹ = T(-A, P)` and the same for `T₀`, with
/// `W = diag((-1)^x)`, entry by entry and without tolerance.
pub fn parity_conjugate_check(params: &HalfLineParams, n: usize) -> Result<()> {
    let flipped = HalfLineParams::with_a(-params.a, params.p)?;
    for rank_one in [true, false] {
        let t = build_t(params, rank_one, n)?;
        let target = build_t(&flipped, rank_one, n)?;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                worst = worst.max((t.get(i, j) * sign - target.get(i, j)).norm());
            }
        }
        if worst != 0.0 {
            return Err(Error::ParityMismatch(worst));
        }
    }
    Ok(())
}

/// `v + v*` on sites `0..n`.
pub fn free_laplacian(n: usize) -> Result<OperatorMatrix> {
    let v = halfline_shift(n)?;
    Ok(&v + &v.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, heat_trace_diff};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Max entry difference over sites `0..n-2`.
    fn interior_diff(x: &OperatorMatrix, y: &OperatorMatrix) -> f64 {
        let n = x.dim();
        let mut m = 0.0f64;
        for i in 0..n - 2 {
            for j in 0..n - 2 {
                m = m.max((x.get(i, j) - y.get(i, j)).norm());
            }
        }
        m
    }

    #[test]
    fn symbol_examples() {
        let s = FSymbol::new(Side::Plus, 0.0, 0.0);
        let z = Complex64::from_polar(1.0, -PI / 2.0);
        assert!((f_symbol_eval(&s, z) - c(1.0, 0.0)).norm() < 1e-15);

        let s = FSymbol::new(Side::Plus, 1.0, 0.3);
        for th in [0.0, 1.0, 2.5] {
            let v = f_symbol_eval(&s, Complex64::from_polar(1.0, th));
            assert!((v - c(0.0, -s.q * s.a)).norm() < 1e-15);
        }

        let s = FSymbol::new(Side::Minus, 0.6, -0.28);
        let v = f_symbol_eval(&s, c(1.0, 0.0));
        assert!((v - c(0.0, s.p * s.b - s.q * s.a)).norm() < 1e-15);
    }

    #[test]
    fn symbol_matches_trigonometric_form() {
        let s = FSymbol::new(Side::Plus, 0.35, -0.8);
        for k in 0..16 {
            let th = k as f64 * 0.4;
            let v = f_symbol_eval(&s, Complex64::from_polar(1.0, -th));
            let want = c(s.b * th.sin(), s.p * s.b * th.cos() - s.q * s.a);
            assert!((v - want).norm() < 1e-15);
        }
    }

    #[test]
    fn halfline_matrices() {
        let s = FSymbol::new(Side::Plus, 0.0, 0.0);
        let f = build_f_halfline(&s, 6).unwrap();
        let v = halfline_shift(6).unwrap();
        let want = (&v.adjoint() - &v).scale(c(0.0, 0.5));
        assert_eq!(f.max_diff(&want).unwrap(), 0.0);

        let plus = FSymbol::new(Side::Plus, 0.3, 0.5);
        let f = build_f_halfline(&plus, 6).unwrap();
        assert!((f.get(0, 1) - c(0.0, 0.5 * 1.5 * plus.b)).norm() < 1e-15);
        assert!((f.get(1, 0) - c(0.0, -0.5 * 0.5 * plus.b)).norm() < 1e-15);
        assert!((f.get(2, 2) - c(0.0, -plus.q * plus.a)).norm() < 1e-15);

        let minus = FSymbol { side: Side::Minus, ..plus };
        let g = build_f_halfline(&minus, 6).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(g.get(i, j), f.get(j, i));
            }
        }
        assert!(build_f_halfline(&plus, 3).is_err());
    }

    #[test]
    fn trivial_coin_product() {
        let s = FSymbol::new(Side::Plus, 0.0, 0.0);
        let n = 8;
        let v = halfline_shift(n).unwrap();
        let v2 = &v * &v;
        let mut want = (&v2 + &v2.adjoint()).scale_real(-1.0).shift_diagonal(c(2.0, 0.0));
        want = &want - &omega0(n);
        let got = product_closed_form(&s, Product::StarF, n).unwrap();
        assert!(got.max_diff(&want.scale_real(0.25)).unwrap() < 1e-15);
    }

    #[test]
    fn gapless_commutator_is_rank_one() {
        for p in [0.5, -0.3] {
            let s = FSymbol::new(Side::Plus, p, p);
            let n = 10;
            let d = &product_closed_form(&s, Product::StarF, n).unwrap()
                - &product_closed_form(&s, Product::FStar, n).unwrap();
            let want = omega0(n).scale_real(-s.b * s.b * p);
            assert!(d.max_diff(&want).unwrap() < 1e-15);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn closed_form_matches_products(
            a in -1.0f64..1.0, p in -1.0f64..1.0, plus in any::<bool>(),
        ) {
            let side = if plus { Side::Plus } else { Side::Minus };
            let s = FSymbol::new(side, a, p);
            let n = 12;
            let f = build_f_halfline(&s, n).unwrap();
            let star_f = &f.adjoint() * &f;
            let f_star = &f * &f.adjoint();
            let cf = product_closed_form(&s, Product::StarF, n).unwrap();
            let cfs = product_closed_form(&s, Product::FStar, n).unwrap();
            prop_assert!(interior_diff(&star_f, &cf) < 1e-12);
            prop_assert!(interior_diff(&f_star, &cfs) < 1e-12);
            // The two products differ by a multiple of Ω₀ only.
            let d = &cf - &cfs;
            prop_assert!(d.rank(1e-12).unwrap() <= 1);
            for i in 0..n {
                for j in 0..n {
                    if (i, j) != (0, 0) {
                        prop_assert!(d.get(i, j).norm() < 1e-15);
                    }
                }
            }
        }

        #[test]
        fn square_form_matches_products(
            p in -0.95f64..0.95, flip in any::<bool>(), plus in any::<bool>(),
        ) {
            let a = if flip { -p } else { p };
            let side = if plus { Side::Plus } else { Side::Minus };
            let s = FSymbol::new(side, a, p);
            let n = 12;
            let f = build_f_halfline(&s, n).unwrap();
            for (which, prod) in [
                (Product::StarF, &f.adjoint() * &f),
                (Product::FStar, &f * &f.adjoint()),
            ] {
                let sq = product_square_form(&s, which, n).unwrap();
                prop_assert!(interior_diff(&prod, &sq) < 1e-12);
            }
        }
    }

    #[test]
    fn square_form_requires_gapless() {
        let s = FSymbol::new(Side::Plus, 0.3, 0.6);
        assert!(matches!(product_square_form(&s, Product::StarF, 8), Err(Error::NotGapless { .. })));
    }

    #[test]
    fn constants() {
        let hp = HalfLineParams::new(0.6).unwrap();
        assert!((hp.m_p() - 0.36 / 0.64).abs() < 1e-15);
        assert!((hp.alpha_p() - 0.64f64.powi(2) / 4.0).abs() < 1e-15);
        assert!((1.0 / hp.alpha_p() - hp.edge()).abs() < 1e-12);
        assert!((hp.offset() + 2.0 * hp.m_p()).abs() < 1e-15);
        let crit = HalfLineParams::new(0.5f64.sqrt()).unwrap();
        assert!((crit.m_p() - 1.0).abs() < 1e-12);
        assert!(HalfLineParams::new(0.7).unwrap().m_p() < 1.0);
        assert!(HalfLineParams::new(0.75).unwrap().m_p() > 1.0);
        assert!(HalfLineParams::new(1.0).is_err());
    }

    #[test]
    fn t_structure() {
        let hp = HalfLineParams::new(0.4).unwrap();
        let n = 30;
        let t = build_t(&hp, true, n).unwrap();
        let t0 = build_t(&hp, false, n).unwrap();
        let d = &t - &t0;
        assert!((d.get(0, 0).re - hp.rank_one_weight()).abs() < 1e-14);
        assert_eq!(d.rank(1e-14).unwrap(), 1);
        // T₀ is the square of the truncated v + v* + c.
        let shifted = free_laplacian(n).unwrap().shift_diagonal(c(hp.offset(), 0.0));
        assert!(t0.max_diff(&(&shifted * &shifted)).unwrap() < 1e-14);
        assert!(t.is_real());

        let l0 = hermitian_eigenvalues(&t0).unwrap();
        let l = hermitian_eigenvalues(&t).unwrap();
        assert!(l0[0] >= -1e-12);
        // T ≥ T₀ implies ordered eigenvalues.
        assert!(l.iter().zip(&l0).all(|(x, y)| x >= &(y - 1e-12)));
        let free = build_t(&HalfLineParams::new(0.0).unwrap(), false, 400).unwrap();
        let top = *hermitian_eigenvalues(&free).unwrap().last().unwrap();
        assert!(top < 4.0 && top > 3.999);
    }

    #[test]
    fn table_relation_for_t() {
        let p = 0.45;
        let s = FSymbol::new(Side::Plus, -p, p);
        let n = 16;
        let f = build_f_halfline(&s, n).unwrap();
        let hp = HalfLineParams::new(p).unwrap();
        let t = build_t(&hp, true, n).unwrap();
        let lhs = t.scale_real(-hp.alpha_p()).shift_diagonal(c(1.0, 0.0));
        assert!(interior_diff(&lhs, &(&f.adjoint() * &f)) < 1e-12);
    }

    #[test]
    fn parity_conjugation() {
        for (a, p) in [(-0.5, 0.5), (0.5, 0.5), (0.0, 0.3), (0.7, -0.7)] {
            let hp = HalfLineParams::with_a(a, p).unwrap();
            assert!(parity_conjugate_check(&hp, 40).is_ok());
        }
        let n = 60;
        let pos = HalfLineParams::with_a(0.5, 0.5).unwrap();
        let neg = HalfLineParams::with_a(-0.5, 0.5).unwrap();
        let heat = |hp: &HalfLineParams| {
            let t = build_t(hp, true, n).unwrap().scale_real(-hp.alpha_p()).shift_diagonal(c(1.0, 0.0));
            let t0 = build_t(hp, false, n).unwrap().scale_real(-hp.alpha_p()).shift_diagonal(c(1.0, 0.0));
            heat_trace_diff(&t, &t0, 3.0).unwrap()
        };
        assert!((heat(&pos) - heat(&neg)).abs() < 1e-12);
    }
}
