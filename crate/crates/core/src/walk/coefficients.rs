use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::Window;
use crate::{Error, Result};

/// Tolerance for `a² + |b|² = 1` and `p² + |q|² = 1`.
pub const UNITARITY_TOL: f64 = 1e-12;

fn modulus_from(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).sqrt()
}

fn unit_phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / r
    }
}

/// Coin values at a single site.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "SiteRepr", into = "SiteRepr")]
pub struct SiteValues {
    pub a: f64,
    pub b: Complex64,
    pub p: f64,
    pub q: Complex64,
}

#[derive(Serialize, Deserialize)]
struct SiteRepr {
    a: f64,
    p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<Complex64>,
}

impl From<SiteRepr> for SiteValues {
    fn from(r: SiteRepr) -> Self {
        SiteValues {
            a: r.a,
            p: r.p,
            b: r.b.unwrap_or_else(|| Complex64::new(modulus_from(r.a), 0.0)),
            q: r.q.unwrap_or_else(|| Complex64::new(modulus_from(r.p), 0.0)),
        }
    }
}

impl From<SiteValues> for SiteRepr {
    fn from(s: SiteValues) -> Self {
        SiteRepr { a: s.a, p: s.p, b: Some(s.b), q: Some(s.q) }
    }
}

impl SiteValues {
    /// Site with `b, q` real and nonnegative.
    pub fn new(a: f64, p: f64) -> Self {
        SiteValues {
            a,
            p,
            b: Complex64::new(modulus_from(a), 0.0),
            q: Complex64::new(modulus_from(p), 0.0),
        }
    }

    pub fn with_phases(self, arg_b: f64, arg_q: f64) -> Self {
        SiteValues {
            b: Complex64::from_polar(self.b.norm(), arg_b),
            q: Complex64::from_polar(self.q.norm(), arg_q),
            ..self
        }
    }

    /// Replaces `b, q` by their moduli.
    pub fn moduli(self) -> Self {
        SiteValues {
            b: Complex64::new(self.b.norm(), 0.0),
            q: Complex64::new(self.q.norm(), 0.0),
            ..self
        }
    }

    /// `(a² + |b|² - 1, p² + |q|² - 1)`.
    pub fn residuals(&self) -> (f64, f64) {
        (
            self.a * self.a + self.b.norm_sqr() - 1.0,
            self.p * self.p + self.q.norm_sqr() - 1.0,
        )
    }

    fn check(&self, site: i64) -> Result<()> {
        let (r_ab, r_pq) = self.residuals();
        if r_ab.abs() > UNITARITY_TOL {
            return Err(Error::Unitarity { identity: "a^2+|b|^2=1", site, residual: r_ab });
        }
        if r_pq.abs() > UNITARITY_TOL {
            return Err(Error::Unitarity { identity: "p^2+|q|^2=1", site, residual: r_pq });
        }
        Ok(())
    }
}

/// The eight limits `a±, b±, p±, q±` at `x → ±∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "LimitsRepr", into = "LimitsRepr")]
pub struct AnisotropicLimits {
    pub a_plus: f64,
    pub a_minus: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub b_plus: Complex64,
    pub b_minus: Complex64,
    pub q_plus: Complex64,
    pub q_minus: Complex64,
}

/// Config form: `b±`, `q±` may be omitted and then default to the
/// nonnegative value fixed by `a±`, `p±`.
#[derive(Serialize, Deserialize)]
struct LimitsRepr {
    a_plus: f64,
    p_plus: f64,
    a_minus: f64,
    p_minus: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b_plus: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b_minus: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q_plus: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q_minus: Option<Complex64>,
}

impl From<LimitsRepr> for AnisotropicLimits {
    fn from(r: LimitsRepr) -> Self {
        let or_mod = |z: Option<Complex64>, x: f64| z.unwrap_or_else(|| Complex64::new(modulus_from(x), 0.0));
        AnisotropicLimits {
            a_plus: r.a_plus,
            a_minus: r.a_minus,
            p_plus: r.p_plus,
            p_minus: r.p_minus,
            b_plus: or_mod(r.b_plus, r.a_plus),
            b_minus: or_mod(r.b_minus, r.a_minus),
            q_plus: or_mod(r.q_plus, r.p_plus),
            q_minus: or_mod(r.q_minus, r.p_minus),
        }
    }
}

impl From<AnisotropicLimits> for LimitsRepr {
    fn from(l: AnisotropicLimits) -> Self {
        LimitsRepr {
            a_plus: l.a_plus,
            p_plus: l.p_plus,
            a_minus: l.a_minus,
            p_minus: l.p_minus,
            b_plus: Some(l.b_plus),
            b_minus: Some(l.b_minus),
            q_plus: Some(l.q_plus),
            q_minus: Some(l.q_minus),
        }
    }
}

impl AnisotropicLimits {
    /// Limits with `b±, q±` real and nonnegative.
    pub fn new(a_plus: f64, p_plus: f64, a_minus: f64, p_minus: f64) -> Self {
        Self::from_sides(SiteValues::new(a_plus, p_plus), SiteValues::new(a_minus, p_minus))
    }

    pub fn from_sides(plus: SiteValues, minus: SiteValues) -> Self {
        AnisotropicLimits {
            a_plus: plus.a,
            a_minus: minus.a,
            p_plus: plus.p,
            p_minus: minus.p,
            b_plus: plus.b,
            b_minus: minus.b,
            q_plus: plus.q,
            q_minus: minus.q,
        }
    }

    pub fn uniform(site: SiteValues) -> Self {
        Self::from_sides(site, site)
    }

    pub fn plus(&self) -> SiteValues {
        SiteValues { a: self.a_plus, b: self.b_plus, p: self.p_plus, q: self.q_plus }
    }

    pub fn minus(&self) -> SiteValues {
        SiteValues { a: self.a_minus, b: self.b_minus, p: self.p_minus, q: self.q_minus }
    }

    /// Same limits with `b±, q±` replaced by their moduli.
    pub fn moduli(&self) -> Self {
        Self::from_sides(self.plus().moduli(), self.minus().moduli())
    }

    /// Plus and minus sides exchanged.
    pub fn swapped(&self) -> Self {
        Self::from_sides(self.minus(), self.plus())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a_plus", self.a_plus),
            ("a_minus", self.a_minus),
            ("p_plus", self.p_plus),
            ("p_minus", self.p_minus),
        ] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange { name, value: v, expected: "[-1, 1]" });
            }
        }
        // Limits are reported at the sentinel sites ±i64::MAX.
        self.plus().check(i64::MAX)?;
        self.minus().check(i64::MIN)
    }
}

/// Deviation amplitudes of a geometric-decay profile.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecayAmplitudes {
    pub a: f64,
    pub p: f64,
}

/// How coefficients approach their limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    /// Plus limits on `x ≥ 0`, minus limits on `x < 0`.
    TwoSidedStep,
    /// `a(x) = a± + A·ρ^k`, `p(x) = p± + P·ρ^k` with `k = x` for `x ≥ 0` and
    /// `k = -x-1` for `x < 0`; `b, q` are renormalised sitewise and keep the
    /// phase of their limit.
    GeometricDecay { rate: f64, amplitudes: DecayAmplitudes },
}

/// Coin sequences `a, b, p, q` on ℤ given by limits, a profile and finitely
/// many exceptional sites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkCoefficients {
    pub limits: AnisotropicLimits,
    pub profile: Profile,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<i64, SiteValues>,
}

impl WalkCoefficients {
    pub fn step(limits: AnisotropicLimits) -> Self {
        WalkCoefficients { limits, profile: Profile::TwoSidedStep, overrides: BTreeMap::new() }
    }

    /// Translation-invariant coefficients.
    pub fn constant(site: SiteValues) -> Self {
        Self::step(AnisotropicLimits::uniform(site))
    }

    pub fn geometric(limits: AnisotropicLimits, rate: f64, amplitudes: DecayAmplitudes) -> Self {
        WalkCoefficients {
            limits,
            profile: Profile::GeometricDecay { rate, amplitudes },
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_override(mut self, x: i64, site: SiteValues) -> Self {
        self.overrides.insert(x, site);
        self
    }

    pub fn site(&self, x: i64) -> SiteValues {
        if let Some(s) = self.overrides.get(&x) {
            return *s;
        }
        let lim = if x >= 0 { self.limits.plus() } else { self.limits.minus() };
        match self.profile {
            Profile::TwoSidedStep => lim,
            Profile::GeometricDecay { rate, amplitudes } => {
                let k = if x >= 0 { x } else { -x - 1 };
                let decay = rate.powi(k.min(i32::MAX as i64) as i32);
                let a = lim.a + amplitudes.a * decay;
                let p = lim.p + amplitudes.p * decay;
                SiteValues {
                    a,
                    p,
                    b: unit_phase(lim.b) * modulus_from(a),
                    q: unit_phase(lim.q) * modulus_from(p),
                }
            }
        }
    }

    pub fn a(&self, x: i64) -> f64 {
        self.site(x).a
    }

    pub fn b(&self, x: i64) -> Complex64 {
        self.site(x).b
    }

    pub fn p(&self, x: i64) -> f64 {
        self.site(x).p
    }

    pub fn q(&self, x: i64) -> Complex64 {
        self.site(x).q
    }

    /// `θ(x) = arg q(x)`, zero where `q` vanishes.
    pub fn theta(&self, x: i64) -> f64 {
        self.q(x).arg()
    }

    /// Same profile with every `b, q` (limits and exceptional sites) replaced
    /// by its modulus.
    pub fn moduli(&self) -> Self {
        WalkCoefficients {
            limits: self.limits.moduli(),
            profile: self.profile.clone(),
            overrides: self.overrides.iter().map(|(&x, s)| (x, s.moduli())).collect(),
        }
    }

    /// `Σ_{x ∈ window} |♠(x) - ♠±|` over `♠ ∈ {a, b, p, q}`; bounded in the
    /// window size for summable profiles.
    pub fn deviation_sum(&self, window: Window) -> f64 {
        window
            .sites_iter()
            .map(|x| {
                let s = self.site(x);
                let l = if x >= 0 { self.limits.plus() } else { self.limits.minus() };
                (s.a - l.a).abs() + (s.b - l.b).norm() + (s.p - l.p).abs() + (s.q - l.q).norm()
            })
            .sum()
    }
}

/// Checks both unitarity identities at every site of `window` and at every
/// exceptional site, the limits, and the profile parameters.
pub fn validate_coefficients(c: &WalkCoefficients, window: Window) -> Result<()> {
    c.limits.validate()?;
    if let Profile::GeometricDecay { rate, amplitudes } = c.profile {
        if !(rate > 0.0 && rate < 1.0) {
            return Err(Error::OutOfRange { name: "rate", value: rate, expected: "(0, 1)" });
        }
        for (lims, amp) in [
            ([c.limits.a_plus, c.limits.a_minus], amplitudes.a),
            ([c.limits.p_plus, c.limits.p_minus], amplitudes.p),
        ] {
            for lim in lims {
                let bound = (1.0 - lim.abs()).min(1.0) / 2.0;
                if amp.abs() > bound + 1e-12 {
                    return Err(Error::AmplitudeTooLarge { amplitude: amp, bound, limit: lim });
                }
            }
        }
    }
    for x in window.sites_iter().chain(c.overrides.keys().copied()) {
        c.site(x).check(x)?;
    }
    Ok(())
}
