use std::f64::consts::TAU;

use num_complex::Complex64;

use super::WalkCoefficients;
use crate::linalg::{Boundary, OperatorMatrix, Window};
use crate::{Error, Result};

/// Phases `f, g` on a window of sites with `f(x+m) - f(x) = θ2(x+m) - θ1(x)`
/// and `g = f - θ2`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugePair {
    pub m: i64,
    pub start: i64,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl GaugePair {
    pub fn contains(&self, x: i64) -> bool {
        x >= self.start && x < self.start + self.f.len() as i64
    }

    pub fn f_at(&self, x: i64) -> Option<f64> {
        self.contains(x).then(|| self.f[(x - self.start) as usize])
    }

    pub fn g_at(&self, x: i64) -> Option<f64> {
        self.contains(x).then(|| self.g[(x - self.start) as usize])
    }

    pub fn sites(&self) -> std::ops::Range<i64> {
        self.start..self.start + self.f.len() as i64
    }
}

/// Solves `f(x+m) - f(x) = φ(x)` with `φ = θ2(·+m) - θ1` on the sites of
/// `window`.
///
/// `f` vanishes on `{0, …, |m|-1}` and is extended to both sides by
/// partial sums of `φ`, so the recursion holds exactly up to rounding.
pub fn phase_elimination(
    theta1: impl Fn(i64) -> f64,
    theta2: impl Fn(i64) -> f64,
    m: i64,
    window: Window,
) -> Result<GaugePair> {
    if m == 0 {
        return Err(Error::ZeroShift);
    }
    let phi = |x: i64| theta2(x + m) - theta1(x);
    let step = m.abs();
    // For m < 0 the recursion is rewritten with the positive step |m|.
    let phi_pos = |y: i64| if m > 0 { phi(y) } else { -phi(y + step) };

    let lo = window.start.min(0);
    let hi = window.end().max(step);
    let mut f = vec![0.0; (hi - lo) as usize];
    let at = |x: i64| (x - lo) as usize;
    let mut y = 0;
    while y + step < hi {
        f[at(y + step)] = f[at(y)] + phi_pos(y);
        y += 1;
    }
    let mut y = -1;
    while y >= lo {
        f[at(y)] = f[at(y + step)] - phi_pos(y);
        y -= 1;
    }
    let f: Vec<f64> = window.sites_iter().map(|x| f[at(x)]).collect();
    let g = window.sites_iter().zip(&f).map(|(x, fx)| fx - theta2(x)).collect();
    Ok(GaugePair { m, start: window.start, f, g })
}

/// Gauge pair of a split-step walk: `θ1 = arg q`, `θ2 = arg b*`, `m = 1`.
pub fn walk_phase_elimination(c: &WalkCoefficients, window: Window) -> Result<GaugePair> {
    phase_elimination(|x| c.q(x).arg(), |x| -c.b(x).arg(), 1, window)
}

fn angle_gap(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    r.min(TAU - r)
}

/// Coefficients after conjugation by `diag(e^{if}, e^{ig})`: every `b, q`
/// replaced by its modulus.
///
/// `gp` must come from [`walk_phase_elimination`] for these coefficients on
/// `window`; the recursion is re-checked against the actual phases of `b`
/// and `q` before the transform is accepted.
pub fn apply_gauge(c: &WalkCoefficients, gp: &GaugePair, window: Window) -> Result<WalkCoefficients> {
    if gp.m != 1 {
        return Err(Error::OutOfRange { name: "gauge shift", value: gp.m as f64, expected: "1" });
    }
    for x in window.sites_iter() {
        let (Some(f0), Some(g0)) = (gp.f_at(x), gp.g_at(x)) else {
            return Err(Error::CutOutsideWindow { start: gp.start, end: gp.sites().end });
        };
        let b_dev = angle_gap(-c.b(x).arg() - (f0 - g0));
        let q_dev = match gp.f_at(x + 1) {
            Some(f1) => angle_gap(f1 - f0 - (-c.b(x + 1).arg() - c.q(x).arg())),
            None => 0.0,
        };
        let dev = b_dev.max(q_dev);
        if dev > 1e-9 {
            return Err(Error::OutOfRange {
                name: "gauge phase",
                value: dev,
                expected: "f(x+1) - f(x) = arg b*(x+1) - arg q(x)",
            });
        }
    }
    Ok(c.moduli())
}

/// `diag(e^{if}, e^{ig})` on a spinor window, or `diag(e^{if})` on a scalar
/// window.
pub fn gauge_unitary(gp: &GaugePair, window: Window) -> Result<OperatorMatrix> {
    let mut diag = Vec::with_capacity(window.dim());
    for comp in 0..window.components {
        for x in window.sites_iter() {
            let phase = if comp == 0 { gp.f_at(x) } else { gp.g_at(x) };
            let phase = phase.ok_or(Error::CutOutsideWindow { start: gp.start, end: gp.sites().end })?;
            diag.push(Complex64::from_polar(1.0, phase));
        }
    }
    OperatorMatrix::diagonal(Boundary::FullLineTruncated, window, &diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, singular_values};
    use crate::walk::{build_qe0, build_walk, AnisotropicLimits, DecayAmplitudes, SiteValues};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn zero_phases_give_zero_gauge() {
        let gp = phase_elimination(|_| 0.0, |_| 0.0, 1, Window::centered(10)).unwrap();
        assert!(gp.f.iter().chain(&gp.g).all(|&v| v == 0.0));
        assert!(matches!(phase_elimination(|_| 0.0, |_| 0.0, 0, Window::centered(4)), Err(Error::ZeroShift)));
    }

    #[test]
    fn constant_phase_unrolls_linearly() {
        let gp = phase_elimination(|_| PI / 2.0, |_| 0.0, 1, Window::centered(20)).unwrap();
        for x in gp.sites() {
            assert!((gp.f_at(x).unwrap() + x as f64 * PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn recursion_exact_for_larger_and_negative_shifts() {
        let theta1 = |x: i64| if x == 0 { 1.0 } else { 0.0 };
        let theta2 = |x: i64| 0.3 * (x as f64).sin();
        let w = Window::scalar(-16, 33);
        for m in [2, 3, -1, -2] {
            let gp = phase_elimination(theta1, theta2, m, w).unwrap();
            for x in w.sites_iter().filter(|&x| w.contains(x + m)) {
                let lhs = gp.f_at(x + m).unwrap() - gp.f_at(x).unwrap();
                assert!((lhs - (theta2(x + m) - theta1(x))).abs() < 1e-12, "m={m} x={x}");
            }
            let z0 = if m > 0 { 0..m } else { 0..-m };
            for x in z0 {
                assert_eq!(gp.f_at(x), Some(0.0));
            }
            for x in w.sites_iter() {
                assert!((gp.g_at(x).unwrap() - (gp.f_at(x).unwrap() - theta2(x))).abs() < 1e-15);
            }
        }
    }

    fn random_phase_coefficients(seed: u64, n: usize) -> WalkCoefficients {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plus = SiteValues::new(0.3, 0.6).with_phases(0.5, -0.7);
        let minus = SiteValues::new(-0.8, 0.1).with_phases(2.2, 1.4);
        let mut c = WalkCoefficients::geometric(
            AnisotropicLimits::from_sides(plus, minus),
            0.5,
            DecayAmplitudes { a: 0.05, p: 0.1 },
        );
        for x in Window::centered(n).sites_iter() {
            let s = SiteValues::new(rng.gen_range(-0.95..0.95), rng.gen_range(-0.95..0.95))
                .with_phases(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
            c = c.with_override(x, s);
        }
        c
    }

    fn conjugated(d: &OperatorMatrix, m: &OperatorMatrix) -> OperatorMatrix {
        &(&d.adjoint() * m) * d
    }

    #[test]
    fn gauge_makes_off_diagonals_nonnegative() {
        let n = 24;
        let c = random_phase_coefficients(1, n);
        let gp = walk_phase_elimination(&c, Window::centered(n)).unwrap();
        let gauged = apply_gauge(&c, &gp, Window::centered(n)).unwrap();
        let old = build_walk(&c, n, Boundary::FullLineTruncated).unwrap();
        let new = build_walk(&gauged, n, Boundary::FullLineTruncated).unwrap();
        let d = gauge_unitary(&gp, old.gamma.window()).unwrap();
        let g = conjugated(&d, &old.gamma);
        let gp_ = conjugated(&d, &old.gamma_prime);
        assert!(g.max_diff(&new.gamma).unwrap() < 1e-12);
        assert!(gp_.max_diff(&new.gamma_prime).unwrap() < 1e-12);
        let w = g.window();
        for x in w.sites_iter() {
            let b = gp_.site_entry(1, x, 0, x);
            assert!(b.im.abs() < 1e-12 && b.re >= -1e-12);
            if w.contains(x + 1) {
                let q = g.site_entry(0, x, 1, x + 1);
                assert!(q.im.abs() < 1e-12 && q.re >= -1e-12);
            }
        }
    }

    #[test]
    fn gauge_preserves_spectra() {
        let n = 32;
        let c = random_phase_coefficients(2, n);
        let w = Window::centered(n);
        let gauged = apply_gauge(&c, &walk_phase_elimination(&c, w).unwrap(), w).unwrap();
        let sv_old = singular_values(&build_qe0(&c, n, Boundary::FullLineTruncated).unwrap()).unwrap();
        let sv_new = singular_values(&build_qe0(&gauged, n, Boundary::FullLineTruncated).unwrap()).unwrap();
        for (a, b) in sv_old.iter().zip(&sv_new) {
            assert!((a - b).abs() < 1e-12);
        }
        let q_old = hermitian_eigenvalues(&build_walk(&c, n, Boundary::FullLineTruncated).unwrap().q).unwrap();
        let q_new = hermitian_eigenvalues(&build_walk(&gauged, n, Boundary::FullLineTruncated).unwrap().q).unwrap();
        for (a, b) in q_old.iter().zip(&q_new) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_b_phase_is_removed() {
        let n = 16;
        let c = WalkCoefficients::constant(SiteValues::new(0.5, 0.3).with_phases(PI / 3.0, 0.0));
        let w = Window::centered(n);
        let gauged = apply_gauge(&c, &walk_phase_elimination(&c, w).unwrap(), w).unwrap();
        for x in w.sites_iter() {
            assert!((gauged.b(x) - Complex64::new(c.b(x).norm(), 0.0)).norm() < 1e-15);
        }
        let u_old = build_walk(&c, n, Boundary::FullLineTruncated).unwrap().u;
        let u_new = build_walk(&gauged, n, Boundary::FullLineTruncated).unwrap().u;
        let sym = |u: &OperatorMatrix| hermitian_eigenvalues(&(u + &u.adjoint())).unwrap();
        for (a, b) in sym(&u_old).iter().zip(&sym(&u_new)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn nonnegative_coefficients_are_fixed_points() {
        let c = WalkCoefficients::step(AnisotropicLimits::new(0.3, 0.2, 0.7, -0.4));
        let w = Window::centered(12);
        let gp = walk_phase_elimination(&c, w).unwrap();
        assert!(gp.f.iter().all(|&v| v == 0.0));
        assert_eq!(apply_gauge(&c, &gp, w).unwrap(), c);
    }

    #[test]
    fn mismatched_gauge_is_rejected() {
        let c = random_phase_coefficients(3, 8);
        let w = Window::centered(8);
        let wrong = phase_elimination(|_| 0.0, |_| 0.0, 1, w).unwrap();
        assert!(apply_gauge(&c, &wrong, w).is_err());
    }
}
