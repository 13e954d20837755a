//! CSV and SVG emission.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::Context;

/// Float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Half-integers as `+3/2`, integers as `+1`, zero as `0`.
pub fn fmt_half(x: f64) -> String {
    let twice = (2.0 * x).round() as i64;
    let sign = if twice > 0 { "+" } else if twice < 0 { "-" } else { "" };
    let m = twice.abs();
    if m % 2 == 0 {
        format!("{sign}{}", m / 2)
    } else {
        format!("{sign}{m}/2")
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    serde_json::to_writer_pretty(&f, value)?;
    (&f).write_all(b"\n")?;
    Ok(())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const PAD: f64 = 48.0;

fn svg_open(out: &mut String, title: &str) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{title}</text>\n",
        WIDTH / 2.0
    ));
}

/// Line plot of `ξ` against `x`, `y` fixed to `[0, 1]`.
pub fn ssf_svg(path: &Path, title: &str, points: &[(f64, f64)]) -> anyhow::Result<()> {
    let (x0, x1) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * PAD);
    let sy = |y: f64| HEIGHT - PAD - y * (HEIGHT - 2.0 * PAD);
    let mut out = String::new();
    svg_open(&mut out, title);
    out.push_str(&format!(
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>\n",
        WIDTH - 2.0 * PAD,
        HEIGHT - 2.0 * PAD
    ));
    for (y, label) in [(0.0, "0"), (0.5, "1/2"), (1.0, "1")] {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{label}</text>\n",
            PAD - 6.0,
            sy(y) + 4.0
        ));
    }
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"{anchor}\">{x:.3}</text>\n",
            sx(x),
            HEIGHT - PAD + 16.0
        ));
    }
    let pts: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
    out.push_str(&format!("<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"{}\"/>\n", pts.join(" ")));
    out.push_str("</svg>\n");
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Heatmap of `values[i][j]` (row `i` along `y`) on a diverging scale over
/// `[-2, 2]`.
pub fn heatmap_svg(path: &Path, title: &str, values: &[Vec<f64>]) -> anyhow::Result<()> {
    let rows = values.len();
    let cols = values.first().map_or(0, Vec::len);
    let cw = (WIDTH - 2.0 * PAD) / cols.max(1) as f64;
    let ch = (HEIGHT - 2.0 * PAD) / rows.max(1) as f64;
    let colour = |v: f64| {
        let t = (v / 2.0).clamp(-1.0, 1.0);
        let (r, g, b) = if t >= 0.0 {
            (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
        } else {
            (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
        };
        format!("rgb({},{},{})", r as u8, g as u8, b as u8)
    };
    let mut out = String::new();
    svg_open(&mut out, title);
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            out.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"><title>{v}</title></rect>\n",
                PAD + j as f64 * cw,
                HEIGHT - PAD - (i + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05,
                colour(v)
            ));
        }
    }
    out.push_str("</svg>\n");
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_labels() {
        assert_eq!(fmt_half(1.0), "+1");
        assert_eq!(fmt_half(0.5), "+1/2");
        assert_eq!(fmt_half(-1.5), "-3/2");
        assert_eq!(fmt_half(0.0), "0");
        assert_eq!(fmt_half(-2.0), "-2");
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 123456.789] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
