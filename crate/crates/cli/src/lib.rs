//! Command-line front end for the `ssqw` index library.
//!
//! Subcommands: `index`, `ssf`, `det`, `sweep` and `verify`. Exit codes are
//! 0 on success, 1 when a verification check fails (or a computation
//! errors) and 2 for configuration errors.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::output::{fmt_float, fmt_half, heatmap_svg, ssf_svg, write_csv, write_json};
use crate::verify::{run_suite, Suite};

#[derive(Debug, Parser)]
#[command(name = "ssqw", version, about = "Index computations for split-step quantum walks")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Truncation size (overrides the config).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Output file for the subcommand's record or table.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Grid count for `ssf` samples or sweep axes.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Half-line parameter P for `ssf` and `det`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Multiplier applied to every verification tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tol_scale: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic classification and numeric Witten index of the configured walk.
    Index,
    /// Spectral shift function table.
    Ssf {
        /// Also render the curve as SVG.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Perturbation determinant at points `re` or `re:im`.
    Det {
        #[arg(required = true, allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// Classification over a grid of limits.
    Sweep {
        /// Also render the Witten index over the first two varying axes as SVG.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Run verification suites.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
}

#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Verification(usize),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Verification(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e:#}"),
            Failure::Verification(k) => write!(f, "{k} verification check(s) failed"),
            Failure::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

fn runtime(e: anyhow::Error) -> Failure {
    Failure::Runtime(e)
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    cfg.validate().map_err(Failure::Config)?;
    Ok(cfg)
}

fn require_p(cli: &Cli) -> Result<f64, Failure> {
    let p = cli.p.ok_or_else(|| Failure::Config(anyhow!("--p is required")))?;
    if !(p.abs() < 1.0) {
        return Err(Failure::Config(anyhow!("--p must lie in (-1, 1), got {p}")));
    }
    Ok(p)
}

fn out_path<'a>(cli: &'a Cli, configured: &'a Option<PathBuf>) -> Option<&'a Path> {
    cli.out.as_deref().or(configured.as_deref())
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    if !(cli.tol_scale > 0.0) {
        return Err(Failure::Config(anyhow!("--tol-scale must be positive")));
    }
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Index => index(cli, &cfg),
        Command::Ssf { plot } => ssf(cli, &cfg, plot.as_deref()),
        Command::Det { points } => det(cli, &cfg, points),
        Command::Sweep { plot } => sweep(cli, &cfg, plot.as_deref()),
        Command::Verify { suite } => verify(cli, &cfg, *suite),
    }
}

fn index(cli: &Cli, cfg: &RunConfig) -> Result<(), Failure> {
    let rec = commands::run_index(cfg).map_err(runtime)?;
    let l = &rec.cell.limits;
    println!("limits: a+={} p+={} a-={} p-={}", l.a_plus, l.p_plus, l.a_minus, l.p_minus);
    println!("plus side: {}, contribution {}", rec.cell.regime_plus.name(), fmt_half(rec.plus_contribution));
    println!("minus side: {}, contribution {}", rec.cell.regime_minus.name(), fmt_half(rec.minus_contribution));
    println!("{}", commands::classification_line(&rec.cell));
    let r = &rec.numeric;
    for (t, v) in &r.ind_t_samples {
        println!("ind_t t={t:.3}: {v:.6}");
    }
    println!(
        "numeric: n={} extrapolated {:.4} (fit residual {:.2e}, trend {:?})",
        r.truncation, r.extrapolated, r.fit_residual, r.trend
    );
    if let Some(w) = &rec.warning {
        println!("warning: {w}");
    }
    if let Some(path) = out_path(cli, &cfg.output.index) {
        write_json(path, &rec).map_err(runtime)?;
    }
    Ok(())
}

fn ssf(cli: &Cli, cfg: &RunConfig, plot: Option<&Path>) -> Result<(), Failure> {
    let p = require_p(cli)?;
    let samples = commands::run_ssf(p, cli.grid.unwrap_or(400)).map_err(Failure::Config)?;
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| vec![fmt_float(s.x), fmt_float(s.xi), s.region.label.name().to_string(), s.degenerate.to_string()])
        .collect();
    let header = ["x", "xi", "region", "degenerate"];
    match out_path(cli, &cfg.output.ssf) {
        Some(path) => write_csv(path, &header, &rows).map_err(runtime)?,
        None => {
            println!("{}", header.join(","));
            for row in &rows {
                println!("{}", row.join(","));
            }
        }
    }
    if let Some(path) = plot.or(cfg.output.ssf_plot.as_deref()) {
        let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.x, s.xi)).collect();
        ssf_svg(path, &format!("spectral shift function, P = {p}"), &pts).map_err(runtime)?;
    }
    Ok(())
}

fn det(cli: &Cli, cfg: &RunConfig, points: &[String]) -> Result<(), Failure> {
    let p = require_p(cli)?;
    let zs = points.iter().map(|s| commands::parse_point(s)).collect::<anyhow::Result<Vec<_>>>().map_err(Failure::Config)?;
    let rows = commands::run_det(p, &zs).map_err(runtime)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let (re, im) = r.value.map_or((String::new(), String::new()), |v| (fmt_float(v.re), fmt_float(v.im)));
            vec![fmt_float(r.z.re), fmt_float(r.z.im), re, im, r.note.clone()]
        })
        .collect();
    let header = ["z_re", "z_im", "delta_re", "delta_im", "kind"];
    for r in &rows {
        match r.value {
            Some(v) => println!("z = {} {:+}i: Δ = {:.12} {:+.12}i ({})", r.z.re, r.z.im, v.re, v.im, r.note),
            None => println!("z = {} {:+}i: undefined ({})", r.z.re, r.z.im, r.note),
        }
    }
    if let Some(path) = out_path(cli, &cfg.output.det) {
        write_csv(path, &header, &table).map_err(runtime)?;
    }
    Ok(())
}

fn sweep(cli: &Cli, cfg: &RunConfig, plot: Option<&Path>) -> Result<(), Failure> {
    let spec = cfg.sweep_spec(cli.grid);
    spec.validate().map_err(Failure::Config)?;
    let cells = commands::run_sweep(&spec).map_err(Failure::Config)?;
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            let l = &c.limits;
            vec![
                fmt_float(l.a_plus),
                fmt_float(l.p_plus),
                fmt_float(l.a_minus),
                fmt_float(l.p_minus),
                c.fredholm.to_string(),
                c.fredholm_index.map_or(String::new(), |k| k.to_string()),
                fmt_float(c.witten),
                c.regime_plus.name().to_string(),
                c.regime_minus.name().to_string(),
            ]
        })
        .collect();
    let header =
        ["a_plus", "p_plus", "a_minus", "p_minus", "fredholm", "fredholm_index", "witten", "regime_plus", "regime_minus"];
    match out_path(cli, &cfg.output.sweep) {
        Some(path) => write_csv(path, &header, &rows).map_err(runtime)?,
        None => {
            println!("{}", header.join(","));
            for row in &rows {
                println!("{}", row.join(","));
            }
        }
    }
    if let Some(path) = plot.or(cfg.output.sweep_plot.as_deref()) {
        let axes = [spec.a_plus.values(), spec.p_plus.values(), spec.a_minus.values(), spec.p_minus.values()];
        let varying: Vec<usize> = (0..4).filter(|&k| axes[k].len() > 1).collect();
        if varying.len() >= 2 {
            // Cells are row-major; the plot shows the first two varying axes
            // at the first value of any further ones.
            let stride = |k: usize| axes[k + 1..].iter().map(Vec::len).product::<usize>();
            let (ax_x, ax_y) = (varying[1], varying[0]);
            let grid: Vec<Vec<f64>> = (0..axes[ax_y].len())
                .map(|i| (0..axes[ax_x].len()).map(|j| cells[i * stride(ax_y) + j * stride(ax_x)].witten).collect())
                .collect();
            heatmap_svg(path, "Witten index", &grid).map_err(runtime)?;
        }
    }
    Ok(())
}

fn verify(cli: &Cli, cfg: &RunConfig, suite: Suite) -> Result<(), Failure> {
    let checks = run_suite(suite, cfg.n, cli.tol_scale);
    for c in &checks {
        println!(
            "{} {} {} residual={:.3e} tolerance={:.3e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.residual,
            c.tolerance
        );
    }
    if let Some(path) = out_path(cli, &cfg.output.verify) {
        let rows: Vec<Vec<String>> = checks
            .iter()
            .map(|c| vec![c.suite.to_string(), c.name.clone(), fmt_float(c.residual), fmt_float(c.tolerance), c.pass.to_string()])
            .collect();
        write_csv(path, &["suite", "check", "residual", "tolerance", "pass"], &rows).map_err(runtime)?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(Failure::Verification(failed));
    }
    Ok(())
}
