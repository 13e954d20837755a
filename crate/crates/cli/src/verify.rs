//! Verification suites: measured residuals against tolerances.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use ssqw::analytic::{h, perturbation_determinant, ssf, ssf_edge};
use ssqw::halfline::{build_t, parity_conjugate_check, HalfLineParams};
use ssqw::index::{fredholm_classify, halfline_witten_numeric, krein_check, walk_witten_numeric, winding_index};
use ssqw::linalg::{
    exp_difference_bound_check, semicircle_integral, singular_values, BandedResolvent, Boundary, OperatorMatrix,
    Window,
};
use ssqw::walk::{
    apply_gauge, build_qe0, build_walk, chiral_block_extract, reduction_residual, split_at_origin,
    walk_phase_elimination, AnisotropicLimits, DecayAmplitudes, SiteValues, WalkCoefficients,
};
use ssqw::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Analytic,
    Heat,
    Krein,
    Gauge,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Analytic => "analytic",
            Suite::Heat => "heat",
            Suite::Krein => "krein",
            Suite::Gauge => "gauge",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

struct Recorder {
    suite: &'static str,
    scale: f64,
    checks: Vec<Check>,
}

impl Recorder {
    fn record(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        let tolerance = tolerance * self.scale;
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        });
    }

    fn failed(&mut self, name: impl Into<String>, err: impl std::fmt::Display) {
        self.checks.push(Check {
            suite: self.suite,
            name: format!("{} ({err})", name.into()),
            residual: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
        });
    }
}

/// Runs `suite` at truncation `n`, with every tolerance multiplied by
/// `tol_scale`.
pub fn run_suite(suite: Suite, n: usize, tol_scale: f64) -> Vec<Check> {
    let suites: &[Suite] = match suite {
        Suite::All => &[Suite::Algebra, Suite::Analytic, Suite::Heat, Suite::Krein, Suite::Gauge],
        _ => std::slice::from_ref(&suite),
    };
    let mut out = Vec::new();
    for &s in suites {
        let mut r = Recorder { suite: s.name(), scale: tol_scale, checks: Vec::new() };
        match s {
            Suite::Algebra => algebra(&mut r),
            Suite::Analytic => analytic(&mut r, n),
            Suite::Heat => heat(&mut r, n),
            Suite::Krein => krein(&mut r, n),
            Suite::Gauge => gauge(&mut r, n),
            Suite::All => unreachable!(),
        }
        out.extend(r.checks);
    }
    out
}

fn phased_profile() -> WalkCoefficients {
    let plus = SiteValues::new(0.3, 0.7).with_phases(0.4, -1.1);
    let minus = SiteValues::new(-0.6, 0.2).with_phases(2.0, 0.9);
    WalkCoefficients::geometric(AnisotropicLimits::from_sides(plus, minus), 0.6, DecayAmplitudes { a: 0.1, p: -0.1 })
        .with_override(2, SiteValues::new(0.9, -0.4).with_phases(-2.5, 1.3))
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn seeded(seed: u64) -> impl FnMut() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    move || rng.gen::<f64>()
}

fn algebra(r: &mut Recorder) {
    let c = phased_profile();
    let n = 64;
    match build_walk(&c, n, Boundary::Cyclic) {
        Ok(ops) => {
            let id = OperatorMatrix::identity(Boundary::Cyclic, ops.gamma.window());
            let g = &ops.gamma;
            let worst = [
                (g * g).max_diff(&id).unwrap_or(f64::INFINITY),
                (&ops.gamma_prime * &ops.gamma_prime).max_diff(&id).unwrap_or(f64::INFINITY),
                (&(g * &ops.u) * g).max_diff(&ops.u.adjoint()).unwrap_or(f64::INFINITY),
                (&ops.u * &ops.u.adjoint()).max_diff(&id).unwrap_or(f64::INFINITY),
                (&(g * &ops.q) + &(&ops.q * g)).max_abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            r.record("chiral-identities", worst, 1e-12);
            match (chiral_block_extract(g, &ops.q), build_qe0(&c, n, Boundary::Cyclic)) {
                (Ok(block), Ok(q)) => match (singular_values(&block.q0), singular_values(&q)) {
                    (Ok(a), Ok(b)) => r.record("chiral-block-singular-values", max_gap(&a, &b), 1e-10),
                    (Err(e), _) | (_, Err(e)) => r.failed("chiral-block-singular-values", e),
                },
                (Err(e), _) | (_, Err(e)) => r.failed("chiral-block-singular-values", e),
            }
        }
        Err(e) => r.failed("chiral-identities", e),
    }

    let axis = [-0.9, -0.6, -0.25, 0.05, 0.35, 0.7, 0.95];
    let paxis = [-0.85, -0.5, -0.15, 0.2, 0.45, 0.8, 0.99];
    let mut mismatches = 0.0;
    for &ap in &axis {
        for &pp in &paxis {
            for &am in &axis {
                for &pm in &paxis {
                    let l = AnisotropicLimits::new(ap, pp, am, pm);
                    let cell = fredholm_classify(&l);
                    let ok = match (cell.fredholm_index, winding_index(&l, 1024)) {
                        (Some(k), Ok(wn)) => k as i64 == wn && k as f64 == cell.witten,
                        _ => false,
                    };
                    if !ok {
                        mismatches += 1.0;
                    }
                }
            }
        }
    }
    r.record("fredholm-table-winding-witten", mismatches, 0.0);

    let catalan = [1.0, 2.0, 5.0, 14.0];
    let moments: Vec<f64> = (1..=4).map(|k| semicircle_integral(|t| t.powi(2 * k))).collect();
    r.record("semicircle-moments", max_gap(&moments, &catalan), 1e-12);

    let mut rand = seeded(5);
    let mut herm = || {
        let m = OperatorMatrix::from_fn(Boundary::FullLineTruncated, Window::scalar(0, 8), |_, _| {
            Complex64::new(2.0 * rand() - 1.0, 2.0 * rand() - 1.0)
        });
        (&m + &m.adjoint()).scale_real(0.5)
    };
    let mut worst_ratio = 0.0f64;
    for k in 0..100 {
        let (h1, h0) = (herm(), herm());
        let z = Complex64::new(-0.02 * (k + 1) as f64, 0.01 * (k as f64 - 50.0));
        match exp_difference_bound_check(&h1, &h0, z) {
            Ok((lhs, rhs)) => worst_ratio = worst_ratio.max(lhs / rhs),
            Err(e) => return r.failed("exp-difference-bound", e),
        }
    }
    r.record("exp-difference-bound (lhs/rhs)", worst_ratio, 1.0);
}

const P_VALUES: [f64; 6] = [-0.9, -0.5, 0.0, 0.5, FRAC_1_SQRT_2, 0.9];

fn analytic(r: &mut Recorder, n: usize) {
    let mut rand = seeded(9);
    let mut quad = 0.0f64;
    let mut oracle = 0.0f64;
    for k in 0..1000 {
        let z = Complex64::new(20.0 * rand() - 10.0, 20.0 * rand() - 10.0);
        if z.im.abs() < 1e-6 && z.re.abs() <= 2.0 {
            continue;
        }
        let w = match h(z) {
            Ok(w) => w,
            Err(e) => return r.failed("h-quadratic-identity", e),
        };
        quad = quad.max((w * w + z * w + 1.0).norm());
        if k < 50 {
            let z = Complex64::new(z.re * 0.4, 0.5 + z.im.abs() * 0.35);
            let s = semicircle_integral(|t| 1.0 / (Complex64::new(t, 0.0) - z));
            oracle = oracle.max((h(z).unwrap_or(Complex64::new(f64::NAN, 0.0)) - s).norm());
        }
    }
    r.record("h-quadratic-identity", quad, 1e-12);
    r.record("h-semicircle-oracle", oracle, 1e-10);

    let size = n.max(2000);
    let mut det = 0.0f64;
    let mut xi_gap = 0.0f64;
    let mut xi_range = 0.0f64;
    for &p in &P_VALUES {
        let params = HalfLineParams::new(p).expect("valid P");
        let res = match build_t(&params, false, size).and_then(|t| BandedResolvent::new(&t)) {
            Ok(res) => res,
            Err(e) => return r.failed("determinant-resolvent-oracle", e),
        };
        for k in 0..20 {
            let z = Complex64::new(
                -5.0 + (1.3 * params.edge() + 5.0) * k as f64 / 19.0,
                0.5 + 2.5 * ((k * 7) % 20) as f64 / 19.0,
            );
            match (perturbation_determinant(z, &params), res.entry(z)) {
                (Ok(a), Ok(g)) => det = det.max((a - (1.0 + params.rank_one_weight() * g)).norm()),
                (Err(e), _) | (_, Err(e)) => return r.failed("determinant-resolvent-oracle", e),
            }
        }
        let (lo, hi) = (-0.5, 1.2 * params.edge());
        for k in 0..200 {
            let x = lo + (hi - lo) * (k as f64 + 0.5) / 200.0;
            let s = ssf(x, &params);
            xi_range = xi_range.max(-s.xi).max(s.xi - 1.0);
            if (x < 0.0 || x > params.edge()) && s.xi != 0.0 {
                xi_range = xi_range.max(s.xi.abs());
            }
            if s.degenerate {
                continue;
            }
            match perturbation_determinant(Complex64::new(x, 1e-6), &params) {
                Ok(d) => xi_gap = xi_gap.max((s.xi - d.arg() / PI).abs()),
                Err(e) => return r.failed("ssf-argument-oracle", e),
            }
        }
    }
    r.record(format!("determinant-resolvent-oracle (n={size})"), det, 1e-8);
    r.record("ssf-argument-oracle", xi_gap, 1e-3);
    r.record("ssf-range", xi_range, 0.0);
}

fn scaled_grid(n: usize, reference: &[f64], reference_n: f64) -> Vec<f64> {
    reference.iter().map(|t| t * n as f64 / reference_n).collect()
}

fn heat(r: &mut Recorder, n: usize) {
    let ts = scaled_grid(n, &[25.0, 50.0, 100.0, 200.0, 375.0], 3000.0);
    for p in [-0.5, 0.0, 0.5] {
        let params = HalfLineParams::new(p).expect("valid P");
        match halfline_witten_numeric(&params, &ts, n) {
            Ok(rep) => {
                r.record(format!("halfline-edge-limit P={p}"), (rep.term.extrapolated - ssf_edge(&params)).abs(), 0.05);
                r.record(
                    format!("halfline-plus-side P={p}"),
                    (rep.combined.extrapolated - rep.combined_target).abs(),
                    0.05,
                );
            }
            Err(e) => r.failed(format!("halfline-edge-limit P={p}"), e),
        }
    }
    let ts = scaled_grid(n, &[20.0, 45.0, 90.0, 135.0, 180.0], 1500.0);
    for (name, limits, tol) in [
        ("walk-witten fredholm", AnisotropicLimits::new(0.3, 0.8, 0.8, 0.3), 0.02),
        ("walk-witten gapless-plus", AnisotropicLimits::new(0.5, 0.5, 0.8, 0.3), 0.05),
    ] {
        match walk_witten_numeric(&WalkCoefficients::step(limits), n, &ts) {
            Ok(rep) => {
                let target = rep.cell.map_or(f64::NAN, |c| c.witten);
                r.record(name, (rep.extrapolated - target).abs(), tol);
            }
            Err(e) => r.failed(name, e),
        }
    }
}

fn krein(r: &mut Recorder, n: usize) {
    let t = 10.0f64.min(n as f64 / 8.0);
    for p in [-0.5, 0.0, 0.5] {
        match krein_check(&HalfLineParams::new(p).expect("valid P"), t, n) {
            Ok(k) => {
                r.record(format!("krein P={p} t={t}"), k.defect(), 1e-3);
                if p == 0.0 {
                    r.record("krein closed form P=0", (k.rhs - 0.5 * (1.0 - (-t).exp())).abs(), 1e-6);
                }
            }
            Err(e) => r.failed(format!("krein P={p}"), e),
        }
    }
}

fn gauge(r: &mut Recorder, n: usize) {
    let c = phased_profile();
    let m = 64;
    let w = Window::centered(m);
    let gauged = walk_phase_elimination(&c, w).and_then(|gp| apply_gauge(&c, &gp, w));
    let sv = |c: &WalkCoefficients| build_qe0(c, m, Boundary::FullLineTruncated).and_then(|q| singular_values(&q));
    match gauged.and_then(|g| Ok((sv(&c)?, sv(&g)?))) {
        Ok((a, b)) => r.record("gauge-singular-values", max_gap(&a, &b), 1e-12),
        Err(e) => r.failed("gauge-singular-values", e),
    }

    let size = n.min(800);
    match build_qe0(&c, size, Boundary::FullLineTruncated).and_then(|q| split_at_origin(&q)) {
        Ok((_, defect)) => match defect.rank(1e-12) {
            Ok(rank) => r.record("split-defect-rank", rank as f64, 2.0),
            Err(e) => r.failed("split-defect-rank", e),
        },
        Err(e) => r.failed("split-defect-rank", e),
    }
    match (reduction_residual(&c, size), reduction_residual(&c, 2 * size)) {
        (Ok(a), Ok(b)) => r.record(format!("reduction-residual n={size} vs {}", 2 * size), (a - b).abs() / b, 0.01),
        (Err(e), _) | (_, Err(e)) => r.failed("reduction-residual", e),
    }
    let parity_failures = [-0.7, 0.2, 0.6]
        .iter()
        .filter(|&&p| {
            HalfLineParams::with_a(0.3, p)
                .and_then(|hp| parity_conjugate_check(&hp, 32))
                .is_err()
        })
        .count();
    r.record("parity-conjugation", parity_failures as f64, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass() {
        for suite in [Suite::Algebra, Suite::Krein, Suite::Gauge] {
            let checks = run_suite(suite, 160, 1.0);
            assert!(!checks.is_empty());
            for c in &checks {
                assert!(c.pass, "{c:?}");
            }
        }
    }

    #[test]
    fn tolerance_scale_can_force_failure() {
        let checks = run_suite(Suite::Algebra, 160, 1e-30);
        assert!(checks.iter().any(|c| !c.pass));
    }
}
