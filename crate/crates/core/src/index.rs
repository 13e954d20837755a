//! Index computations: the Fredholm table, winding numbers, the analytic
//! Witten index `W(a₊,p₊) - W(a₋,p₋)` and its heat-trace approximation
//! `ind_t(A) = Tr(e^{-tA*A} - e^{-tAA*})`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{ssf, ssf_edge, MRegime, RegionLabel};
use crate::halfline::{build_t, f_symbol_eval, FSymbol, HalfLineParams, Side};
use crate::linalg::{
    heat_trace_diff_from_spectra, hermitian_eigenvalues, integrate_adaptive, Boundary, OperatorMatrix,
};
use crate::walk::{build_qe0, AnisotropicLimits, WalkCoefficients};
use crate::{Error, Result};

/// Tolerance for `|a| = |p|` and for the zero of `sgn` inside `W`.
pub const DIAGONAL_TOL: f64 = 1e-12;

/// Default number of nodes for [`winding_number`].
pub const WINDING_GRID: usize = 4096;

/// Symbol values below this modulus count as vanishing.
pub const VANISHING_TOL: f64 = 1e-9;

/// Fit residual above which a numeric index is flagged unreliable.
pub const UNRELIABLE_RESIDUAL: f64 = 0.1;

/// Number of largest times used by the extrapolation fit.
pub const FIT_POINTS: usize = 4;

/// Sites padded on each side of a full-line window before `A*A` and `AA*`
/// are compressed back.
pub const FULL_LINE_MARGIN: usize = 2;

pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn sgn_tol(x: f64) -> f64 {
    if x.abs() <= DIAGONAL_TOL {
        0.0
    } else {
        sgn(x)
    }
}

fn w_unchecked(r: f64, s: f64) -> f64 {
    if (r.abs() - 1.0).abs() <= DIAGONAL_TOL && (s.abs() - 1.0).abs() <= DIAGONAL_TOL {
        return 0.0;
    }
    (sgn_tol(r + s) - sgn_tol(r - s)) / 2.0
}

/// `W(r, s) = (sgn(r+s) - sgn(r-s))/2`, and `0` when `|r| = |s| = 1`.
pub fn w_function(r: f64, s: f64) -> Result<f64> {
    for (name, v) in [("r", r), ("s", s)] {
        if !(v.abs() <= 1.0 + DIAGONAL_TOL) {
            return Err(Error::OutOfRange { name, value: v, expected: "[-1, 1]" });
        }
    }
    Ok(w_unchecked(r, s))
}

/// `W(a₊, p₊) - W(a₋, p₋)`; limits are assumed valid.
pub fn witten_analytic(limits: &AnisotropicLimits) -> f64 {
    w_unchecked(limits.a_plus, limits.p_plus) - w_unchecked(limits.a_minus, limits.p_minus)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideRegime {
    /// `|p| < |a|`
    GappedBelow,
    /// `|p| > |a|`
    GappedAbove,
    /// `|a| = |p| < 1`
    Gapless,
    /// `|a| = |p| = 1`
    Endpoint,
}

impl SideRegime {
    pub fn of(a: f64, p: f64) -> Self {
        let d = p.abs() - a.abs();
        if d.abs() <= DIAGONAL_TOL {
            if (p.abs() - 1.0).abs() <= DIAGONAL_TOL {
                SideRegime::Endpoint
            } else {
                SideRegime::Gapless
            }
        } else if d < 0.0 {
            SideRegime::GappedBelow
        } else {
            SideRegime::GappedAbove
        }
    }

    pub fn is_gapped(self) -> bool {
        matches!(self, SideRegime::GappedBelow | SideRegime::GappedAbove)
    }

    pub fn name(self) -> &'static str {
        match self {
            SideRegime::GappedBelow => "gapped-below",
            SideRegime::GappedAbove => "gapped-above",
            SideRegime::Gapless => "gapless",
            SideRegime::Endpoint => "endpoint",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationCell {
    pub limits: AnisotropicLimits,
    pub fredholm: bool,
    pub fredholm_index: Option<i32>,
    pub witten: f64,
    pub regime_plus: SideRegime,
    pub regime_minus: SideRegime,
}

/// Fredholm index from the four-row table in `|p±| ≶ |a±|`, or `None`
/// off the Fredholm region.
pub fn fredholm_table(limits: &AnisotropicLimits) -> Option<i32> {
    use SideRegime::*;
    let plus = SideRegime::of(limits.a_plus, limits.p_plus);
    let minus = SideRegime::of(limits.a_minus, limits.p_minus);
    let sp = sgn(limits.p_plus) as i32;
    let sm = sgn(limits.p_minus) as i32;
    match (minus, plus) {
        (GappedBelow, GappedBelow) => Some(0),
        (GappedBelow, GappedAbove) => Some(sp),
        (GappedAbove, GappedBelow) => Some(-sm),
        (GappedAbove, GappedAbove) => Some(sp - sm),
        _ => None,
    }
}

pub fn fredholm_classify(limits: &AnisotropicLimits) -> ClassificationCell {
    let regime_plus = SideRegime::of(limits.a_plus, limits.p_plus);
    let regime_minus = SideRegime::of(limits.a_minus, limits.p_minus);
    let fredholm_index = fredholm_table(limits);
    ClassificationCell {
        limits: *limits,
        fredholm: fredholm_index.is_some(),
        fredholm_index,
        witten: witten_analytic(limits),
        regime_plus,
        regime_minus,
    }
}

/// Winding number around 0 of the Toeplitz symbol of one side: `F₊(e^{-iθ})`
/// for the plus side and `F₋(e^{iθ})` for the minus side, `θ ∈ [0, 2π)`.
/// The Fredholm index of the side is minus this number.
///
/// Argument increments larger than 1 rad are resolved on a finer local grid.
pub fn winding_number(s: &FSymbol, grid: usize) -> Result<i64> {
    if grid < 8 {
        return Err(Error::DimensionTooSmall { min: 8, got: grid });
    }
    let orient = match s.side {
        Side::Plus => -1.0,
        Side::Minus => 1.0,
    };
    let eval = |theta: f64| -> Result<Complex64> {
        let f = f_symbol_eval(s, Complex64::from_polar(1.0, orient * theta));
        if f.norm() < VANISHING_TOL {
            return Err(Error::VanishingSymbol(f.norm()));
        }
        Ok(f)
    };
    fn increment(
        eval: &dyn Fn(f64) -> Result<Complex64>,
        t0: f64,
        t1: f64,
        f0: Complex64,
        f1: Complex64,
        depth: u32,
    ) -> Result<f64> {
        let d = (f1 / f0).arg();
        if d.abs() <= 1.0 || depth == 0 {
            return Ok(d);
        }
        let tm = 0.5 * (t0 + t1);
        let fm = eval(tm)?;
        Ok(increment(eval, t0, tm, f0, fm, depth - 1)? + increment(eval, tm, t1, fm, f1, depth - 1)?)
    }
    let h = 2.0 * PI / grid as f64;
    let first = eval(0.0)?;
    let mut prev = first;
    let mut total = 0.0;
    for k in 1..=grid {
        let theta = k as f64 * h;
        let f = if k == grid { first } else { eval(theta)? };
        total += increment(&eval, theta - h, theta, prev, f, 20)?;
        prev = f;
    }
    let wn = total / (2.0 * PI);
    let rounded = wn.round();
    if (wn - rounded).abs() > 1e-9 {
        return Err(Error::NoConvergence);
    }
    Ok(rounded as i64)
}

/// Fredholm index of `F₊(v*) ⊕ F₋(v)` as `-wn₊ - wn₋`.
pub fn winding_index(limits: &AnisotropicLimits, grid: usize) -> Result<i64> {
    let plus = winding_number(&FSymbol::from_limits(limits, Side::Plus), grid)?;
    let minus = winding_number(&FSymbol::from_limits(limits, Side::Minus), grid)?;
    Ok(-plus - minus)
}

/// Spectra of `A*A` and `AA*` restricted to the interior of `A`'s window.
pub fn product_spectra(a: &OperatorMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = a.margin();
    let adj = a.adjoint();
    let star_a = (&adj * a).with_margin(lo, hi)?.strip_margin();
    let a_star = (a * &adj).with_margin(lo, hi)?.strip_margin();
    Ok((hermitian_eigenvalues(&star_a)?, hermitian_eigenvalues(&a_star)?))
}

/// `Tr(e^{-tA*A} - e^{-tAA*})` with both products compressed to the interior.
pub fn ind_t_numeric(a: &OperatorMatrix, t: f64) -> Result<f64> {
    let (l1, l0) = product_spectra(a)?;
    heat_trace_diff_from_spectra(&l1, &l0, t)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `c0 + c1 t^{-1/2}`
    #[default]
    ConstPlusInverseSqrt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Increasing,
    Decreasing,
    Constant,
    Mixed,
}

impl Trend {
    fn of(values: &[f64]) -> Self {
        let steps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        if steps.iter().all(|&d| d == 0.0) {
            Trend::Constant
        } else if steps.iter().all(|&d| d >= 0.0) {
            Trend::Increasing
        } else if steps.iter().all(|&d| d <= 0.0) {
            Trend::Decreasing
        } else {
            Trend::Mixed
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub cell: Option<ClassificationCell>,
    pub ind_t_samples: Vec<(f64, f64)>,
    pub trend: Trend,
    pub extrapolated: f64,
    /// `(c0, c1)` of the fit.
    pub fit: (f64, f64),
    /// Largest absolute residual of the fit.
    pub fit_residual: f64,
    pub truncation: usize,
    pub unreliable: bool,
}

/// Least-squares `c0 + c1 t^{-1/2}` over the last [`FIT_POINTS`] samples.
/// Returns `((c0, c1), max |residual|)`.
pub fn fit_inverse_sqrt(samples: &[(f64, f64)]) -> Result<((f64, f64), f64)> {
    if samples.len() < 2 {
        return Err(Error::BadTimeGrid);
    }
    let tail = &samples[samples.len().saturating_sub(FIT_POINTS)..];
    let n = tail.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, y) in tail {
        let x = t.powf(-0.5);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(Error::BadTimeGrid);
    }
    let c1 = (n * sxy - sx * sy) / det;
    let c0 = (sy - c1 * sx) / n;
    let residual = tail.iter().map(|&(t, y)| (c0 + c1 * t.powf(-0.5) - y).abs()).fold(0.0, f64::max);
    Ok(((c0, c1), residual))
}

fn check_time_grid(t_grid: &[f64], dim: usize) -> Result<()> {
    if t_grid.len() < 2 || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::BadTimeGrid);
    }
    if !(t_grid[0] > 0.0) {
        return Err(Error::NonPositiveTime(t_grid[0]));
    }
    let bound = dim as f64 / 8.0;
    let t_max = t_grid[t_grid.len() - 1];
    if t_max > bound {
        return Err(Error::PropagationBound { t: t_max, bound });
    }
    Ok(())
}

fn report_from_samples(
    samples: Vec<(f64, f64)>,
    fit: FitModel,
    truncation: usize,
    cell: Option<ClassificationCell>,
) -> Result<IndexReport> {
    let FitModel::ConstPlusInverseSqrt = fit;
    let ((c0, c1), residual) = fit_inverse_sqrt(&samples)?;
    let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(IndexReport {
        cell,
        trend: Trend::of(&values),
        ind_t_samples: samples,
        extrapolated: c0,
        fit: (c0, c1),
        fit_residual: residual,
        truncation,
        unreliable: residual > UNRELIABLE_RESIDUAL || !c0.is_finite(),
    })
}

/// `ind_t(A)` on `t_grid` with extrapolation to `t → ∞`.
///
/// `t_grid` must be ascending with `t_max ≤ d/8`, `d` the interior dimension.
pub fn witten_numeric(a: &OperatorMatrix, t_grid: &[f64], fit: FitModel) -> Result<IndexReport> {
    let (lo, hi) = a.margin();
    let interior = a.dim() - (lo + hi) * a.window().components;
    check_time_grid(t_grid, interior)?;
    let (l1, l0) = product_spectra(a)?;
    let samples = t_grid
        .iter()
        .map(|&t| Ok((t, heat_trace_diff_from_spectra(&l1, &l0, t)?)))
        .collect::<Result<Vec<_>>>()?;
    report_from_samples(samples, fit, interior, None)
}

/// `Q_ε0` on the centred window of `n` sites, padded by
/// [`FULL_LINE_MARGIN`] sites on each side.
pub fn padded_qe0(c: &WalkCoefficients, n: usize) -> Result<OperatorMatrix> {
    if n % 2 != 0 {
        return Err(Error::OddWindow(n));
    }
    let m = FULL_LINE_MARGIN;
    build_qe0(c, n + 2 * m, Boundary::FullLineTruncated)?.with_margin(m, m)
}

/// [`witten_numeric`] for the full-line `Q_ε0` of a walk, with its
/// analytic classification attached.
pub fn walk_witten_numeric(c: &WalkCoefficients, n: usize, t_grid: &[f64]) -> Result<IndexReport> {
    let q = padded_qe0(c, n)?;
    let mut report = witten_numeric(&q, t_grid, FitModel::ConstPlusInverseSqrt)?;
    report.cell = Some(fredholm_classify(&c.limits));
    Ok(report)
}

/// Spectra of `T` and `T₀` at `A = -P` on `n` sites.
fn t_spectra(params: &HalfLineParams, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((hermitian_eigenvalues(&build_t(params, true, n)?)?, hermitian_eigenvalues(&build_t(params, false, n)?)?))
}

/// `e^{-t} Tr(e^{tα_P T} - e^{tα_P T₀})` from the spectra of `T` and `T₀`.
fn halfline_term(l1: &[f64], l0: &[f64], alpha: f64, t: f64) -> Result<f64> {
    let map = |l: &[f64]| l.iter().rev().map(|&x| 1.0 - alpha * x).collect::<Vec<_>>();
    heat_trace_diff_from_spectra(&map(l1), &map(l0), t)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfLineReport {
    pub params: HalfLineParams,
    /// `e^{-t} Tr(e^{tα_P T} - e^{tα_P T₀})`, limit `ξ(α_P⁻¹ - 0)`.
    pub term: IndexReport,
    pub term_target: f64,
    /// Term at `P` minus term at `-P`: `ind_t` of the plus-side operator
    /// with `p₊ = P`, limit `sgn(P)/2`.
    pub combined: IndexReport,
    pub combined_target: f64,
}

/// Heat-trace terms of the gapless half-line reduction at truncation `n`.
pub fn halfline_witten_numeric(params: &HalfLineParams, t_grid: &[f64], n: usize) -> Result<HalfLineReport> {
    check_time_grid(t_grid, n)?;
    let params = HalfLineParams::new(params.p)?;
    let mirror = HalfLineParams::new(-params.p)?;
    let alpha = params.alpha_p();
    let (l1, l0) = t_spectra(&params, n)?;
    // `T₀` depends on `P` only through `AP = -P²`, so it is shared with `-P`.
    let k1 = hermitian_eigenvalues(&build_t(&mirror, true, n)?)?;
    let k0 = &l0;
    let mut term = Vec::with_capacity(t_grid.len());
    let mut combined = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let here = halfline_term(&l1, &l0, alpha, t)?;
        let there = halfline_term(&k1, k0, alpha, t)?;
        term.push((t, here));
        combined.push((t, here - there));
    }
    let fit = FitModel::ConstPlusInverseSqrt;
    Ok(HalfLineReport {
        params,
        term: report_from_samples(term, fit, n, None)?,
        term_target: ssf_edge(&params),
        combined: report_from_samples(combined, fit, n, None)?,
        combined_target: sgn(params.p) / 2.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KreinCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl KreinCheck {
    pub fn defect(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Zeros of `D(x) = -2P√x + √(τ₊²-4) - √(τ₋²-4)` in the open outer gap.
fn outer_gap_sign_changes(params: &HalfLineParams, lo: f64, hi: f64) -> Vec<f64> {
    let p = params.p;
    let c = 2.0 * params.m_p();
    let d = |x: f64| {
        let r = x.sqrt();
        -2.0 * p * r + ((c + r).powi(2) - 4.0).sqrt() - ((c - r).powi(2) - 4.0).sqrt()
    };
    const SCAN: usize = 2000;
    let mut roots = Vec::new();
    let node = |k: usize| lo + (hi - lo) * k as f64 / SCAN as f64;
    for k in 0..SCAN {
        let (mut a, mut b) = (node(k).max(lo * (1.0 + 1e-12) + 1e-300), node(k + 1).min(hi * (1.0 - 1e-12)));
        let (fa, fb) = (d(a), d(b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if d(m) * fa > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

/// `∫₀^{α_P⁻¹} tα_P e^{t(α_P x - 1)} ξ(x) dx`.
///
/// Integrated piecewise over the region partition; on the outer gap `ξ` is
/// piecewise constant and each piece is integrated in closed form.
pub fn krein_rhs(params: &HalfLineParams, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let params = HalfLineParams::new(params.p)?;
    let alpha = params.alpha_p();
    let edge = params.edge();
    let kernel = |x: f64| t * alpha * (t * (alpha * x - 1.0)).exp();
    // Antiderivative of the kernel.
    let prim = |x: f64| (t * (alpha * x - 1.0)).exp();
    if params.p == 0.0 {
        return Ok(0.5 * (prim(edge) - prim(0.0)));
    }
    let lower = 4.0 * (1.0 - params.m_p()).powi(2);
    let mut total = 0.0;
    let arctan_piece = |a: f64, b: f64| -> Result<f64> {
        Ok(integrate_adaptive(|x| kernel(x) * ssf(x, &params).xi, a, b, 1e-12)?.0)
    };
    match MRegime::of(&params) {
        MRegime::Critical => total += arctan_piece(0.0, edge)?,
        MRegime::Below => {
            total += arctan_piece(0.0, lower)?;
            total += arctan_piece(lower, edge)?;
        }
        MRegime::Above => {
            let mut cuts = vec![0.0];
            cuts.extend(outer_gap_sign_changes(&params, 0.0, lower));
            cuts.push(lower);
            for w in cuts.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                let s = ssf(mid, &params);
                debug_assert_eq!(s.region.label, RegionLabel::OuterGap);
                total += s.xi * (prim(w[1]) - prim(w[0]));
            }
            total += arctan_piece(lower, edge)?;
        }
    }
    Ok(total)
}

/// Both sides of the Krein trace formula for `(T, T₀)` at `A = -P`:
/// `lhs = e^{-t} Tr(e^{tα_P T} - e^{tα_P T₀})` at truncation `n`, and
/// [`krein_rhs`].
pub fn krein_check(params: &HalfLineParams, t: f64, n: usize) -> Result<KreinCheck> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let bound = n as f64 / 8.0;
    if t > bound {
        return Err(Error::PropagationBound { t, bound });
    }
    let params = HalfLineParams::new(params.p)?;
    let (l1, l0) = t_spectra(&params, n)?;
    Ok(KreinCheck { lhs: halfline_term(&l1, &l0, params.alpha_p(), t)?, rhs: krein_rhs(&params, t)? })
}
