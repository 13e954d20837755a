use num_complex::Complex64;

use super::{apply_gauge, build_qe0, walk_phase_elimination, AnisotropicLimits, WalkCoefficients};
use crate::linalg::{trace_norm, Boundary, OperatorMatrix, Window};
use crate::{Error, Result};

fn require_cut(window: Window) -> Result<()> {
    if !(window.contains(-1) && window.contains(0)) {
        return Err(Error::CutOutsideWindow { start: window.start, end: window.end() });
    }
    Ok(())
}

fn crosses_cut(window: Window, i: usize, j: usize) -> bool {
    (window.site(i).1 < 0) != (window.site(j).1 < 0)
}

/// Splits `Q` into `P₋QP₋ + P₊QP₊` and the defect coupling sites `x < 0` to
/// sites `x ≥ 0`. Returns `(split, defect)`.
pub fn split_at_origin(q: &OperatorMatrix) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let w = q.window();
    require_cut(w)?;
    let mut split = q.clone();
    let mut defect = OperatorMatrix::zeros(q.boundary(), w);
    for j in 0..q.dim() {
        for i in 0..q.dim() {
            if crosses_cut(w, i, j) {
                defect.set(i, j, q.get(i, j));
                split.set(i, j, Complex64::new(0.0, 0.0));
            }
        }
    }
    Ok((split, defect))
}

/// Maps a block-diagonal full-line matrix to its two half-line blocks.
///
/// The negative side is reindexed by `x ↦ -x-1`, so both blocks act on sites
/// `0, 1, 2, …`. Returns `(minus, plus)`.
pub fn reindex_halflines(m: &OperatorMatrix) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let w = m.window();
    require_cut(w)?;
    let mut coupling = 0.0f64;
    for j in 0..m.dim() {
        for i in 0..m.dim() {
            if crosses_cut(w, i, j) {
                coupling = coupling.max(m.get(i, j).norm());
            }
        }
    }
    if coupling > 1e-14 * m.max_abs().max(1.0) {
        return Err(Error::NotBlockDiagonal(coupling));
    }
    let minus_w = Window { start: 0, sites: (-w.start) as usize, components: w.components };
    let plus_w = Window { start: 0, sites: w.end() as usize, components: w.components };
    let pick = |hw: Window, to_full: fn(i64) -> i64| {
        OperatorMatrix::from_fn(Boundary::HalfLineTruncated, hw, |i, j| {
            let (ci, yi) = hw.site(i);
            let (cj, yj) = hw.site(j);
            m.site_entry(ci, to_full(yi), cj, to_full(yj))
        })
    };
    Ok((pick(minus_w, |y| -y - 1), pick(plus_w, |y| y)))
}

/// Inverse of [`reindex_halflines`].
pub fn reassemble(minus: &OperatorMatrix, plus: &OperatorMatrix) -> Result<OperatorMatrix> {
    let (mw, pw) = (minus.window(), plus.window());
    if mw.components != pw.components {
        return Err(Error::DimensionMismatch { left: mw.components, right: pw.components });
    }
    let w = Window { start: -(mw.sites as i64), sites: mw.sites + pw.sites, components: mw.components };
    Ok(OperatorMatrix::from_fn(Boundary::FullLineTruncated, w, |i, j| {
        let (ci, xi) = w.site(i);
        let (cj, xj) = w.site(j);
        match (xi < 0, xj < 0) {
            (true, true) => minus.site_entry(ci, -xi - 1, cj, -xj - 1),
            (false, false) => plus.site_entry(ci, xi, cj, xj),
            _ => Complex64::new(0.0, 0.0),
        }
    }))
}

/// `P₋F₋(L)P₋ + P₊F₊(L)P₊` on a full-line window, with
/// `F(X) = (i/2)[(1+p)b X - (1-p)b X* - 2qa]` built from the moduli of the
/// limits.
pub fn limit_operator(limits: &AnisotropicLimits, window: Window) -> Result<OperatorMatrix> {
    require_cut(window)?;
    let half = Complex64::new(0.0, 0.5);
    let mut m = OperatorMatrix::zeros(Boundary::FullLineTruncated, window);
    for x in window.sites_iter() {
        let s = if x >= 0 { limits.plus() } else { limits.minus() };
        let (a, b, p, q) = (s.a, s.b.norm(), s.p, s.q.norm());
        let i = window.index(0, x).expect("site in window");
        m.set(i, i, half * (-2.0 * q * a));
        let same_side = |y: i64| window.contains(y) && ((y < 0) == (x < 0));
        if same_side(x + 1) {
            m.set(i, i + 1, half * ((1.0 + p) * b));
        }
        if same_side(x - 1) {
            m.set(i, i - 1, half * (-(1.0 - p) * b));
        }
    }
    Ok(m)
}

/// Trace norm of `Q_ε0 - (P₋F₋(L)P₋ + P₊F₊(L)P₊)` on the centred window of
/// `n` sites, after the coefficients are gauged to nonnegative `b, q`.
pub fn reduction_residual(c: &WalkCoefficients, n: usize) -> Result<f64> {
    let w = Window::centered(n);
    require_cut(w)?;
    let gauged = apply_gauge(c, &walk_phase_elimination(c, w)?, w)?;
    let q = build_qe0(&gauged, n, Boundary::FullLineTruncated)?;
    trace_norm(&(&q - &limit_operator(&gauged.limits, w)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{DecayAmplitudes, SiteValues};

    fn step() -> WalkCoefficients {
        WalkCoefficients::step(AnisotropicLimits::new(0.6, 0.8, -0.28, 0.5))
    }

    #[test]
    fn defect_has_rank_two() {
        let q = build_qe0(&step(), 16, Boundary::FullLineTruncated).unwrap();
        let (split, defect) = split_at_origin(&q).unwrap();
        assert_eq!(defect.rank(1e-12).unwrap(), 2);
        assert_eq!((&split + &defect).max_diff(&q).unwrap(), 0.0);
        let (minus, plus) = reindex_halflines(&split).unwrap();
        assert_eq!((minus.dim(), plus.dim()), (8, 8));
        assert!(reindex_halflines(&q).is_err());
    }

    #[test]
    fn diagonal_matrix_has_no_defect() {
        let w = Window::centered(6);
        let d: Vec<Complex64> = (0..6).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let m = OperatorMatrix::diagonal(Boundary::FullLineTruncated, w, &d).unwrap();
        assert_eq!(split_at_origin(&m).unwrap().1.max_abs(), 0.0);
        let (minus, plus) = reindex_halflines(&m).unwrap();
        // Minus side reversed: y = 0 is x = -1.
        assert_eq!(minus.get(0, 0).re, 2.0);
        assert_eq!(minus.get(2, 2).re, 0.0);
        assert_eq!(plus.get(0, 0).re, 3.0);
        let zero = OperatorMatrix::zeros(Boundary::FullLineTruncated, w);
        let (zm, zp) = reindex_halflines(&zero).unwrap();
        assert_eq!(zm.max_abs() + zp.max_abs(), 0.0);
    }

    #[test]
    fn trivial_coin_defect_entries() {
        let c = WalkCoefficients::constant(SiteValues::new(0.0, 0.0));
        let q = build_qe0(&c, 10, Boundary::FullLineTruncated).unwrap();
        let (_, defect) = split_at_origin(&q).unwrap();
        let nonzero: Vec<_> = (0..10)
            .flat_map(|i| (0..10).map(move |j| (i, j)))
            .filter(|&(i, j)| defect.get(i, j).norm() > 0.0)
            .collect();
        assert_eq!(nonzero.len(), 2);
        assert!((defect.site_entry(0, -1, 0, 0) - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((defect.site_entry(0, 0, 0, -1) - Complex64::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn split_requires_cut() {
        let m = OperatorMatrix::zeros(Boundary::HalfLineTruncated, Window::half_line(4));
        assert!(matches!(split_at_origin(&m), Err(Error::CutOutsideWindow { .. })));
    }

    #[test]
    fn reindex_round_trip_and_halfline_symbols() {
        let c = step();
        let w = Window::centered(14);
        let f = limit_operator(&c.limits, w).unwrap();
        let (minus, plus) = reindex_halflines(&f).unwrap();
        assert_eq!(reassemble(&minus, &plus).unwrap().max_diff(&f).unwrap(), 0.0);
        // Minus side becomes F₋(v): the L coefficient lands on the subdiagonal.
        let s = c.limits.minus();
        let want = Complex64::new(0.0, 0.5 * (1.0 + s.p) * s.b.re);
        assert!((minus.get(1, 0) - want).norm() < 1e-15);
        let s = c.limits.plus();
        let want = Complex64::new(0.0, 0.5 * (1.0 + s.p) * s.b.re);
        assert!((plus.get(0, 1) - want).norm() < 1e-15);
    }

    #[test]
    fn constant_residual_is_cut_defect() {
        let site = SiteValues::new(0.6, -0.3).with_phases(1.0, 0.4);
        let c = WalkCoefficients::constant(site);
        let r = reduction_residual(&c, 40).unwrap();
        // (1/2)(1+p)b + (1/2)(1-p)b = b.
        assert!((r - 0.8).abs() < 1e-12);
    }

    #[test]
    fn step_residual_is_local() {
        let c = step();
        let r = reduction_residual(&c, 40).unwrap();
        let w = Window::centered(40);
        let q = build_qe0(&c, 40, Boundary::FullLineTruncated).unwrap();
        let residual = &q - &limit_operator(&c.limits, w).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                if residual.get(i, j).norm() > 1e-15 {
                    let (xi, xj) = (w.site(i).1, w.site(j).1);
                    assert!([-1, 0].contains(&xi) && [-1, 0].contains(&xj));
                }
            }
        }
        assert!((r - trace_norm(&residual).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn geometric_residual_stabilises() {
        let c = WalkCoefficients::geometric(
            AnisotropicLimits::new(0.6, 0.8, -0.28, 0.5),
            0.5,
            DecayAmplitudes { a: 0.1, p: 0.05 },
        );
        let r1 = reduction_residual(&c, 200).unwrap();
        let r2 = reduction_residual(&c, 400).unwrap();
        assert!((r1 - r2).abs() < 0.01 * r2);
    }
}
