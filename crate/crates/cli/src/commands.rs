//! Subcommand bodies, separated from argument parsing and printing.

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::Serialize;
use ssqw::analytic::{boundary_det, perturbation_determinant, ssf, SSFSample};
use ssqw::halfline::HalfLineParams;
use ssqw::index::{fredholm_classify, walk_witten_numeric, w_function, ClassificationCell, IndexReport};
use ssqw::walk::AnisotropicLimits;
use ssqw::Complex64;

use crate::config::{RunConfig, SweepSpec};
use crate::output::fmt_half;

#[derive(Clone, Debug, Serialize)]
pub struct IndexRecord {
    pub cell: ClassificationCell,
    /// `W(a₊, p₊)`
    pub plus_contribution: f64,
    /// `-W(a₋, p₋)`
    pub minus_contribution: f64,
    pub numeric: IndexReport,
    pub warning: Option<String>,
}

pub fn run_index(cfg: &RunConfig) -> anyhow::Result<IndexRecord> {
    let l = cfg.limits;
    let numeric = walk_witten_numeric(&cfg.coefficients(), cfg.n, &cfg.time_grid())?;
    let warning = numeric
        .unreliable
        .then(|| format!("extrapolation unreliable: fit residual {:.3e}", numeric.fit_residual));
    Ok(IndexRecord {
        cell: fredholm_classify(&l),
        plus_contribution: w_function(l.a_plus, l.p_plus)?,
        minus_contribution: -w_function(l.a_minus, l.p_minus)?,
        numeric,
        warning,
    })
}

/// `Fredholm, index +1, witten +1` or `non-Fredholm, witten +1/2`.
pub fn classification_line(cell: &ClassificationCell) -> String {
    match cell.fredholm_index {
        Some(k) => format!("Fredholm, index {}, witten {}", fmt_half(k as f64), fmt_half(cell.witten)),
        None => format!("non-Fredholm, witten {}", fmt_half(cell.witten)),
    }
}

/// `ξ` on `grid` evenly spaced points of `[-0.5, 1.2·4(1+m_P)²]`.
pub fn run_ssf(p: f64, grid: usize) -> anyhow::Result<Vec<SSFSample>> {
    if grid < 2 {
        bail!("grid must be at least 2, got {grid}");
    }
    let params = HalfLineParams::new(p)?;
    let (lo, hi) = (-0.5, 1.2 * params.edge());
    Ok((0..grid)
        .map(|k| ssf(lo + (hi - lo) * k as f64 / (grid - 1) as f64, &params))
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct DetRow {
    pub z: Complex64,
    pub value: Option<Complex64>,
    /// `interior`, `boundary` (limit from above) or `negative-axis`, or the
    /// reason the value is undefined.
    pub note: String,
}

/// Parses `re` or `re:im`.
pub fn parse_point(s: &str) -> anyhow::Result<Complex64> {
    let parse = |t: &str| t.trim().parse::<f64>().with_context(|| format!("bad number {t:?} in point {s:?}"));
    match s.split_once(':') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(s)?, 0.0)),
    }
}

pub fn run_det(p: f64, points: &[Complex64]) -> anyhow::Result<Vec<DetRow>> {
    let params = HalfLineParams::new(p)?;
    Ok(points
        .iter()
        .map(|&z| {
            let (value, note) = if z.im != 0.0 {
                (perturbation_determinant(z, &params), "interior")
            } else if z.re < 0.0 {
                (perturbation_determinant(z, &params), "negative-axis")
            } else {
                (boundary_det(z.re, &params), "boundary")
            };
            match value {
                Ok(v) => DetRow { z, value: Some(v), note: note.to_string() },
                Err(e) => DetRow { z, value: None, note: e.to_string() },
            }
        })
        .collect())
}

/// Classification of every cell of the sweep grid, in row-major order over
/// `(a₊, p₊, a₋, p₋)`.
pub fn run_sweep(spec: &SweepSpec) -> anyhow::Result<Vec<ClassificationCell>> {
    spec.validate()?;
    let mut cells = Vec::new();
    for &ap in &spec.a_plus.values() {
        for &pp in &spec.p_plus.values() {
            for &am in &spec.a_minus.values() {
                for &pm in &spec.p_minus.values() {
                    cells.push(AnisotropicLimits::new(ap, pp, am, pm));
                }
            }
        }
    }
    Ok(cells.par_iter().map(fredholm_classify).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Axis;

    #[test]
    fn point_parsing() {
        assert_eq!(parse_point("2.5").unwrap(), Complex64::new(2.5, 0.0));
        assert_eq!(parse_point("-1:0.5").unwrap(), Complex64::new(-1.0, 0.5));
        assert!(parse_point("1:x").is_err());
    }

    #[test]
    fn det_rows_cover_all_kinds() {
        let rows = run_det(0.0, &[Complex64::new(1.0, 1.0), Complex64::new(-2.0, 0.0), Complex64::new(2.0, 0.0)])
            .unwrap();
        assert_eq!(rows[0].note, "interior");
        assert_eq!(rows[1].note, "negative-axis");
        assert_eq!(rows[2].note, "boundary");
        let b = rows[2].value.unwrap();
        assert!((b - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        let edge = run_det(0.0, &[Complex64::new(4.0, 0.0)]).unwrap();
        assert!(edge[0].value.is_none());
    }

    #[test]
    fn sweep_order_is_row_major() {
        let spec = SweepSpec {
            a_plus: Axis::Range { min: -0.5, max: 0.5, count: 3 },
            p_plus: Axis::Range { min: -0.9, max: 0.9, count: 2 },
            a_minus: Axis::Fixed(0.8),
            p_minus: Axis::Fixed(0.3),
        };
        let cells = run_sweep(&spec).unwrap();
        assert_eq!(cells.len(), 6);
        assert_eq!((cells[0].limits.a_plus, cells[0].limits.p_plus), (-0.5, -0.9));
        assert_eq!((cells[1].limits.a_plus, cells[1].limits.p_plus), (-0.5, 0.9));
        assert_eq!(cells[5].limits.a_plus, 0.5);
    }
}
