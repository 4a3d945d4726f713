//! Minimal SVG emission: polyline time-series charts (per-run traces in
//! red, cross-run average in black) and particle scatter snapshots.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

fn fmt_tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 0.01 && v.abs() < 100_000.0) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Line chart of one per-tick quantity: every run as a thin red trace, the
/// average as a heavy black one. Gaps (absent values) break the polyline.
pub fn line_chart(
    path: &Path,
    title: &str,
    runs: &[Vec<Option<f64>>],
    average: &[Option<f64>],
) -> Result<()> {
    let len = average.len().max(runs.iter().map(|r| r.len()).max().unwrap_or(0));
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for series in runs.iter().chain(std::iter::once(&average.to_vec())) {
        for v in series.iter().flatten() {
            min_y = min_y.min(*v);
            max_y = max_y.max(*v);
        }
    }
    if !min_y.is_finite() {
        (min_y, max_y) = (0.0, 1.0);
    }
    if min_y == max_y {
        max_y = min_y + 1.0;
    }
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let x_of = |tick: f64| MARGIN_L + (tick - 1.0) / (len.max(2) as f64 - 1.0) * plot_w;
    let y_of = |v: f64| MARGIN_T + (max_y - v) / (max_y - min_y) * plot_h;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )?;
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    )?;
    // frame
    writeln!(
        svg,
        r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#888"/>"##
    )?;
    // axis labels: y min/max, x 1..len
    writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
        MARGIN_L - 6.0,
        MARGIN_T + 12.0,
        fmt_tick(max_y)
    )?;
    writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
        MARGIN_L - 6.0,
        MARGIN_T + plot_h,
        fmt_tick(min_y)
    )?;
    for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let tick = 1.0 + frac * (len.max(2) as f64 - 1.0);
        writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            x_of(tick),
            HEIGHT - MARGIN_B + 20.0,
            fmt_tick(tick.round())
        )?;
    }

    let emit_series = |series: &[Option<f64>], style: &str, svg: &mut String| {
        let mut points = String::new();
        let flush = |points: &mut String, svg: &mut String| {
            // two or more vertices make a drawable segment
            if points.matches(' ').count() >= 2 {
                let _ = writeln!(svg, r#"<polyline points="{}" fill="none" {style}/>"#, points.trim());
            }
            points.clear();
        };
        for (i, v) in series.iter().enumerate() {
            match v {
                Some(v) => {
                    let _ = write!(points, "{:.2},{:.2} ", x_of((i + 1) as f64), y_of(*v));
                }
                None => flush(&mut points, svg),
            }
        }
        flush(&mut points, svg);
    };

    for run in runs {
        emit_series(run, r##"stroke="#cc3333" stroke-width="0.7" opacity="0.35""##, &mut svg);
    }
    emit_series(average, r##"stroke="#111111" stroke-width="1.8""##, &mut svg);
    writeln!(svg, "</svg>")?;
    std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Scatter plot of particle positions, hue keyed by type.
pub fn scatter_snapshot(
    path: &Path,
    title: &str,
    particles: &[(f64, f64, u32)],
    num_types: u32,
) -> Result<()> {
    let side = 640.0;
    let margin = 30.0;
    let plot = side - 2.0 * margin;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}">"#
    )?;
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(
        svg,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>"#,
        side / 2.0
    )?;
    writeln!(
        svg,
        r##"<rect x="{margin}" y="{margin}" width="{plot}" height="{plot}" fill="none" stroke="#888"/>"##
    )?;
    for &(x, y, ty) in particles {
        let hue = (f64::from(ty) / f64::from(num_types.max(1))) * 360.0;
        writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.2" fill="hsl({:.0},70%,45%)"/>"#,
            margin + x * plot,
            margin + (1.0 - y) * plot, // y up
            hue
        )?;
    }
    writeln!(svg, "</svg>")?;
    std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
