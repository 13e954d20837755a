use std::f64::consts::PI;
use std::ops::{Add, Mul};

use crate::{Error, Result};

/// Default number of θ-nodes for [`semicircle_integral`].
pub const SEMICIRCLE_GRID: usize = 16384;

/// Nodes in `(0, π)` with positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Uniform rule `θ_k = (k + 1/2)π/N`, weights `π/N`. For integrands that
    /// extend to smooth even periodic functions this is the trapezoid rule on
    /// the full period and converges spectrally.
    pub fn uniform_theta(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionTooSmall { min: 1, got: 0 });
        }
        let h = PI / n as f64;
        Ok(QuadratureRule {
            nodes: (0..n).map(|k| (k as f64 + 0.5) * h).collect(),
            weights: vec![h; n],
        })
    }

    pub fn integrate<T>(&self, f: impl Fn(f64) -> T) -> T
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::default(), |acc, (&x, &w)| acc + f(x) * w)
    }
}

/// `∫_{-2}^{2} g(t) √(4 - t²) / (2π) dt`, evaluated as
/// `(2/π) ∫_0^π g(2cos θ) sin²θ dθ` on a uniform θ-grid.
pub fn semicircle_integral<T>(g: impl Fn(f64) -> T) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    let rule = QuadratureRule::uniform_theta(SEMICIRCLE_GRID).expect("nonzero grid");
    rule.integrate(|th| {
        let s = th.sin();
        g(2.0 * th.cos()) * (2.0 / PI * s * s)
    })
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let x = h * XGK[k];
        let pair = f(c - x) + f(c + x);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7, 15) quadrature on `[a, b]`.
///
/// Intervals are bisected until each local error estimate is below its share
/// of `tol`. Returns `(value, error estimate)`.
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    const MAX_INTERVALS: usize = 20_000;
    let width = (b - a).abs();
    let mut stack = vec![(a, b)];
    let (mut total, mut err) = (0.0, 0.0);
    let mut processed = 0;
    while let Some((lo, hi)) = stack.pop() {
        processed += 1;
        if processed > MAX_INTERVALS {
            return Err(Error::NoConvergence);
        }
        let (v, e) = gauss_kronrod(&f, lo, hi);
        let share = tol * (hi - lo).abs() / width;
        if e <= share.max(f64::EPSILON * v.abs()) || (hi - lo).abs() < 1e-14 * width {
            total += v;
            err += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    Ok((total, err))
}
