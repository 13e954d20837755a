//! JSON run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use ssqw::linalg::Window;
use ssqw::walk::{validate_coefficients, AnisotropicLimits, Profile, SiteValues, WalkCoefficients};

pub const MIN_TRUNCATION: usize = 64;
pub const DEFAULT_TRUNCATION: usize = 800;

/// Reference grid at `n = 1500`, rescaled linearly for other truncations.
const REFERENCE_T_GRID: [f64; 5] = [20.0, 45.0, 90.0, 135.0, 180.0];

fn default_profile() -> Profile {
    Profile::TwoSidedStep
}

fn default_n() -> usize {
    DEFAULT_TRUNCATION
}

/// One sweep axis: a fixed value or `count ≥ 2` evenly spaced values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Fixed(f64),
    Range { min: f64, max: f64, count: usize },
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Axis::Fixed(v) => vec![v],
            Axis::Range { min, max, count } => {
                (0..count).map(|k| min + (max - min) * k as f64 / (count - 1) as f64).collect()
            }
        }
    }

    fn with_count(self, count: usize) -> Self {
        match self {
            Axis::Range { min, max, .. } => Axis::Range { min, max, count },
            fixed => fixed,
        }
    }

    fn validate(&self, name: &str) -> anyhow::Result<()> {
        match *self {
            Axis::Fixed(v) if !(v.abs() <= 1.0) => bail!("sweep axis {name}: value {v} outside [-1, 1]"),
            Axis::Range { min, max, count } => {
                if count < 2 {
                    bail!("sweep axis {name}: count must be at least 2, got {count}");
                }
                if !(min.abs() <= 1.0 && max.abs() <= 1.0 && min < max) {
                    bail!("sweep axis {name}: need -1 <= min < max <= 1, got [{min}, {max}]");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub a_plus: Axis,
    pub p_plus: Axis,
    pub a_minus: Axis,
    pub p_minus: Axis,
}

impl SweepSpec {
    /// `(a₊, p₊)` slice over `[-1, 1]²` with the minus side fixed.
    pub fn plus_slice(limits: &AnisotropicLimits, count: usize) -> Self {
        let range = Axis::Range { min: -1.0, max: 1.0, count };
        SweepSpec {
            a_plus: range,
            p_plus: range,
            a_minus: Axis::Fixed(limits.a_minus),
            p_minus: Axis::Fixed(limits.p_minus),
        }
    }

    pub fn with_count(&self, count: usize) -> Self {
        SweepSpec {
            a_plus: self.a_plus.with_count(count),
            p_plus: self.p_plus.with_count(count),
            a_minus: self.a_minus.with_count(count),
            p_minus: self.p_minus.with_count(count),
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.a_plus.validate("a_plus")?;
        self.p_plus.validate("p_plus")?;
        self.a_minus.validate("a_minus")?;
        self.p_minus.validate("p_minus")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub index: Option<PathBuf>,
    pub ssf: Option<PathBuf>,
    pub det: Option<PathBuf>,
    pub sweep: Option<PathBuf>,
    pub verify: Option<PathBuf>,
    pub ssf_plot: Option<PathBuf>,
    pub sweep_plot: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub limits: AnisotropicLimits,
    #[serde(default = "default_profile")]
    pub profile: Profile,
    #[serde(default)]
    pub overrides: BTreeMap<i64, SiteValues>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputPaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            limits: AnisotropicLimits::new(0.3, 0.8, 0.8, 0.3),
            profile: default_profile(),
            overrides: BTreeMap::new(),
            n: DEFAULT_TRUNCATION,
            t_grid: None,
            sweep: None,
            output: OutputPaths::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).context("malformed config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn coefficients(&self) -> WalkCoefficients {
        WalkCoefficients { limits: self.limits, profile: self.profile.clone(), overrides: self.overrides.clone() }
    }

    /// Configured time grid, or the reference grid scaled to `n`.
    pub fn time_grid(&self) -> Vec<f64> {
        match &self.t_grid {
            Some(t) => t.clone(),
            None => REFERENCE_T_GRID.iter().map(|t| t * self.n as f64 / 1500.0).collect(),
        }
    }

    pub fn sweep_spec(&self, grid: Option<usize>) -> SweepSpec {
        let base = self.sweep.clone().unwrap_or_else(|| SweepSpec::plus_slice(&self.limits, 41));
        match grid {
            Some(count) => base.with_count(count),
            None => base,
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.n < MIN_TRUNCATION {
            bail!("n must be at least {MIN_TRUNCATION}, got {}", self.n);
        }
        if self.n % 2 != 0 {
            bail!("n must be even, got {}", self.n);
        }
        self.limits.validate().context("invalid limits")?;
        validate_coefficients(&self.coefficients(), Window::centered(self.n)).context("invalid coefficients")?;
        if let Some(t) = &self.t_grid {
            if t.len() < 2 {
                bail!("t_grid needs at least two points");
            }
            if t[0] <= 0.0 || t.windows(2).any(|w| !(w[1] > w[0])) {
                bail!("t_grid must be positive and strictly ascending");
            }
            let bound = self.n as f64 / 8.0;
            if t[t.len() - 1] > bound {
                bail!("t_grid maximum {} exceeds n/8 = {bound}", t[t.len() - 1]);
            }
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::from_json(r#"{"limits": {"a_plus": 0.3, "p_plus": 0.8, "a_minus": 0.8, "p_minus": 0.3}}"#)
            .unwrap();
        assert_eq!(cfg.n, DEFAULT_TRUNCATION);
        assert_eq!(cfg.profile, Profile::TwoSidedStep);
        let t = cfg.time_grid();
        assert_eq!(t.len(), 5);
        assert!(t[4] <= cfg.n as f64 / 8.0);
    }

    #[test]
    fn full_config_round_trips() {
        let text = r#"{
            "limits": {"a_plus": 0.5, "p_plus": 0.5, "a_minus": 0.8, "p_minus": 0.3},
            "profile": {"kind": "geometric-decay", "rate": 0.5, "amplitudes": {"a": 0.05, "p": 0.05}},
            "overrides": {"3": {"a": 0.1, "p": -0.2}},
            "n": 128,
            "t_grid": [2.0, 4.0, 8.0, 16.0],
            "sweep": {"a_plus": {"min": -1.0, "max": 1.0, "count": 5}, "p_plus": 0.2,
                      "a_minus": 0.8, "p_minus": {"min": -0.9, "max": 0.9, "count": 3}},
            "output": {"index": "out.json"}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.overrides.len(), 1);
        assert_eq!(cfg.sweep_spec(None).a_plus.values().len(), 5);
        assert_eq!(cfg.sweep_spec(Some(7)).p_minus.values().len(), 7);
        assert_eq!(cfg.sweep_spec(Some(7)).p_plus, Axis::Fixed(0.2));
        let again = RunConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let limits = r#""limits": {"a_plus": 0.3, "p_plus": 0.8, "a_minus": 0.8, "p_minus": 0.3}"#;
        for extra in [
            r#""n": 32"#,
            r#""n": 101"#,
            r#""t_grid": [5.0, 4.0]"#,
            r#""t_grid": [5.0, 500.0]"#,
            r#""sweep": {"a_plus": {"min": -1, "max": 1, "count": 1}, "p_plus": 0, "a_minus": 0, "p_minus": 0}"#,
            r#""unknown": 1"#,
        ] {
            let text = format!("{{{limits}, {extra}}}");
            assert!(RunConfig::from_json(&text).is_err(), "{extra}");
        }
        assert!(RunConfig::from_json(r#"{"limits": {"a_plus": 1.3, "p_plus": 0, "a_minus": 0, "p_minus": 0}}"#).is_err());
        assert!(RunConfig::from_json("not json").is_err());
    }
}
