//! Scalar analytic kernel for the pair `(T, T₀)`.
//!
//! `H(z)` is the Stieltjes transform of the semicircle law, i.e. the
//! `(0, 0)` resolvent entry of `v + v*` on the half-line. The perturbation
//! determinant `Δ(z) = 1 + (2/(1-P))⟨δ₀, (T₀-z)⁻¹δ₀⟩` reduces to two values of
//! `H` at `τ±(z) = 2m_P ± √z`, and the spectral shift function is
//! `ξ(x) = Arg Δ(x + i0)/π`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::halfline::HalfLineParams;
use crate::{Error, Result};

/// Half-width of the exclusion band around region breakpoints.
pub const BREAKPOINT_GUARD: f64 = 1e-9;

/// `|m_P - 1|` below which the critical case `|P| = 1/√2` is used.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Principal square root, `Re √z > 0`, undefined on `(-∞, 0]`.
pub fn principal_sqrt(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::BranchCut(z));
    }
    Ok(z.sqrt())
}

/// `H(z)`, the root of `w² + zw + 1 = 0` with `|w| < 1`, for `z ∉ [-2, 2]`.
///
/// Evaluated as `-2 / (z + (z+2)√((z-2)/(z+2)))`, which equals
/// `(-z + (z+2)√((z-2)/(z+2)))/2` but avoids cancellation for large `|z|`.
pub fn h(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re.abs() <= 2.0 {
        return Err(Error::OnInterval(z));
    }
    let s = principal_sqrt((z - 2.0) / (z + 2.0))?;
    Ok(-2.0 / (z + (z + 2.0) * s))
}

/// `τ±(z) = 2m_P ± √z`.
pub fn tau_pm(z: Complex64, params: &HalfLineParams) -> Result<(Complex64, Complex64)> {
    let w = principal_sqrt(z)?;
    let c = 2.0 * params.m_p();
    Ok((c + w, c - w))
}

/// `Δ(z) = 1 + (H(τ₊) - H(τ₋)) / ((1-P)√z)` for `z ∉ [0, ∞)`.
///
/// On the negative axis `√z` is replaced by `i√|z|`; `Δ` is even in `√z`, so
/// either square root gives the same value.
pub fn perturbation_determinant(z: Complex64, params: &HalfLineParams) -> Result<Complex64> {
    let w = if z.im == 0.0 {
        if z.re >= 0.0 {
            return Err(Error::OnSpectrum(z));
        }
        Complex64::new(0.0, (-z.re).sqrt())
    } else {
        principal_sqrt(z)?
    };
    let c = Complex64::new(2.0 * params.m_p(), 0.0);
    let diff = h(c + w)? - h(c - w)?;
    Ok(1.0 + diff / ((1.0 - params.p) * w))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MRegime {
    /// `m_P < 1`, i.e. `|P| < 1/√2`.
    Below,
    /// `|P| = 1/√2`.
    Critical,
    /// `m_P > 1`.
    Above,
}

impl MRegime {
    pub fn of(params: &HalfLineParams) -> Self {
        let m = params.m_p();
        if (m - 1.0).abs() <= CRITICAL_TOL {
            MRegime::Critical
        } else if m < 1.0 {
            MRegime::Below
        } else {
            MRegime::Above
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionLabel {
    BelowZero,
    /// `|τ±| < 2`; only for `m_P < 1`.
    Inner,
    /// `τ₊ > 2`, `|τ₋| < 2`.
    Middle,
    /// `τ± > 2`; only for `m_P > 1`.
    OuterGap,
    /// `x > 4(1+m_P)²`.
    AboveEdge,
}

impl RegionLabel {
    pub fn name(self) -> &'static str {
        match self {
            RegionLabel::BelowZero => "below-zero",
            RegionLabel::Inner => "inner",
            RegionLabel::Middle => "middle",
            RegionLabel::OuterGap => "outer-gap",
            RegionLabel::AboveEdge => "above-edge",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionTag {
    pub label: RegionLabel,
    pub regime: MRegime,
    /// Open interval `(lo, hi)`; unbounded ends are infinite.
    pub interval: (f64, f64),
}

/// Region breakpoints in `[0, ∞)`: `0`, the lower breakpoint `4(1-m_P)²`
/// (absent in the critical case) and the edge `4(1+m_P)²`.
pub fn breakpoints(params: &HalfLineParams) -> Vec<f64> {
    let m = params.m_p();
    let mut bps = vec![0.0];
    if MRegime::of(params) != MRegime::Critical {
        bps.push(4.0 * (1.0 - m).powi(2));
    }
    bps.push(params.edge());
    bps
}

/// Breakpoint within the guard band around `x`, if any.
pub fn nearest_breakpoint(x: f64, params: &HalfLineParams) -> Option<f64> {
    breakpoints(params)
        .into_iter()
        .find(|&bp| (x - bp).abs() < BREAKPOINT_GUARD * bp.max(1.0))
}

/// Region containing `x`, by strict comparison with the breakpoints.
pub fn region(x: f64, params: &HalfLineParams) -> RegionTag {
    let regime = MRegime::of(params);
    let m = params.m_p();
    let lower = 4.0 * (1.0 - m).powi(2);
    let edge = params.edge();
    let (label, interval) = if x < 0.0 {
        (RegionLabel::BelowZero, (f64::NEG_INFINITY, 0.0))
    } else if x > edge {
        (RegionLabel::AboveEdge, (edge, f64::INFINITY))
    } else {
        match regime {
            MRegime::Critical => (RegionLabel::Middle, (0.0, edge)),
            MRegime::Below if x < lower => (RegionLabel::Inner, (0.0, lower)),
            MRegime::Above if x < lower => (RegionLabel::OuterGap, (0.0, lower)),
            _ => (RegionLabel::Middle, (lower, edge)),
        }
    };
    RegionTag { label, regime, interval }
}

/// `lim_{ε↓0} (τ+2)√((τ-2)/(τ+2))` at `τ = τ±(x + iε)` for real `τ`.
fn edge_term(tau: f64, upper: bool) -> Complex64 {
    if tau > 2.0 {
        Complex64::new((tau * tau - 4.0).sqrt(), 0.0)
    } else if tau < -2.0 {
        Complex64::new(-(tau * tau - 4.0).sqrt(), 0.0)
    } else {
        let im = (4.0 - tau * tau).sqrt();
        Complex64::new(0.0, if upper { im } else { -im })
    }
}

/// Numerator `-2P√x + L(τ₊) - L(τ₋)` of `Δ(x + i0) = N / (2(1-P)√x)`.
fn boundary_numerator(x: f64, params: &HalfLineParams) -> Complex64 {
    let r = x.sqrt();
    let c = 2.0 * params.m_p();
    -2.0 * params.p * r + edge_term(c + r, true) - edge_term(c - r, false)
}

/// `lim_{ε↓0} Δ(x + iε)` for `x > 0` away from the breakpoints.
pub fn boundary_det(x: f64, params: &HalfLineParams) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(Error::OutOfRange { name: "x", value: x, expected: "(0, inf)" });
    }
    if nearest_breakpoint(x, params).is_some() {
        return Err(Error::Breakpoint(x));
    }
    Ok(boundary_numerator(x, params) / (2.0 * (1.0 - params.p) * x.sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SSFSample {
    pub x: f64,
    pub xi: f64,
    pub region: RegionTag,
    /// `x` lies within the guard band of a breakpoint; `xi` is then the mean
    /// of the two one-sided limits.
    pub degenerate: bool,
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Region formula for `ξ`, without breakpoint handling.
fn ssf_formula(x: f64, params: &HalfLineParams, tag: &RegionTag) -> f64 {
    let p = params.p;
    let r = x.sqrt();
    let c = 2.0 * params.m_p();
    let (tp, tm) = (c + r, c - r);
    match tag.label {
        RegionLabel::BelowZero | RegionLabel::AboveEdge => 0.0,
        _ if p == 0.0 => 0.5,
        RegionLabel::Inner => {
            let den = (4.0 - tp * tp).sqrt() + (4.0 - tm * tm).sqrt();
            0.5 - (-2.0 * p * r / den).atan() / PI
        }
        RegionLabel::Middle if tag.regime == MRegime::Critical => {
            let q = x.sqrt().sqrt();
            0.5 - ((-2.0 * p * q + (4.0 + r).sqrt()) / (4.0 - r).sqrt()).atan() / PI
        }
        RegionLabel::Middle => {
            let num = -2.0 * p * r + (tp * tp - 4.0).sqrt();
            0.5 - (num / (4.0 - tm * tm).sqrt()).atan() / PI
        }
        RegionLabel::OuterGap => {
            let d = -2.0 * p * r + (tp * tp - 4.0).sqrt() - (tm * tm - 4.0).sqrt();
            0.5 - 0.5 * sgn(d)
        }
    }
}

/// Spectral shift function of `(T, T₀)` by region.
///
/// Within the guard band of a breakpoint the mean of the two one-sided
/// values is returned with `degenerate` set.
pub fn ssf(x: f64, params: &HalfLineParams) -> SSFSample {
    if let Some(bp) = nearest_breakpoint(x, params) {
        let d = 4.0 * BREAKPOINT_GUARD * bp.max(1.0);
        let side = |y: f64| ssf_formula(y, params, &region(y, params));
        return SSFSample {
            x,
            xi: 0.5 * (side(bp - d) + side(bp + d)),
            region: region(x, params),
            degenerate: true,
        };
    }
    let tag = region(x, params);
    SSFSample { x, xi: ssf_formula(x, params, &tag), region: tag, degenerate: false }
}

/// `ξ(α_P⁻¹ - 0)`: `0` for `P < 0`, `1/2` for `P ≥ 0`.
pub fn ssf_edge(params: &HalfLineParams) -> f64 {
    if params.p < 0.0 {
        0.0
    } else {
        0.5
    }
}
