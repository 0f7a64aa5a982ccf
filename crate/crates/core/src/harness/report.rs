//! Deterministic CSV and SVG emission for verdicts and shadow curves.

use super::Verdict;
use crate::shadow::CurvePoint;
use std::fmt::Write as _;
use std::path::Path;

/// Shortest-roundtrip decimal form, with fixed spellings for the
/// non-finite values so CSV bytes never vary.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_owned()
    } else if x == f64::INFINITY {
        "inf".to_owned()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_owned()
    } else {
        format!("{x}")
    }
}

fn sanitize(field: &str) -> String {
    field.replace(',', ";").replace('\n', " ")
}

pub fn verdicts_to_csv(verdicts: &[Verdict]) -> String {
    let mut out = String::from("instance,name,claim,status,value,lower,upper,margin,note\n");
    for v in verdicts {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            sanitize(&v.instance),
            sanitize(&v.name),
            sanitize(&v.claim),
            v.status,
            fmt_float(v.value),
            fmt_float(v.lower),
            fmt_float(v.upper),
            fmt_float(v.margin),
            sanitize(&v.note),
        );
    }
    out
}

pub fn write_csv(path: &Path, verdicts: &[Verdict]) -> std::io::Result<()> {
    std::fs::write(path, verdicts_to_csv(verdicts))
}

/// A plotted t-curve: sampled values with error bars plus the indices of
/// grid points where a midpoint convexity check failed.
#[derive(Clone, Debug)]
pub struct NamedCurve {
    pub name: String,
    pub points: Vec<CurvePoint>,
    pub violations: Vec<usize>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;

/// 800x600 line plot of the curve: polyline through the midpoints, one
/// vertical error bar per point, and a red marker on every violation.
pub fn curve_svg(curve: &NamedCurve) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"30\" font-family=\"monospace\" font-size=\"16\">{}</text>",
        MARGIN_LEFT,
        sanitize(&curve.name)
    );
    if curve.points.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }

    let t_min = curve.points.first().map(|p| p.t).unwrap_or(0.0);
    let t_max = curve.points.last().map(|p| p.t).unwrap_or(1.0);
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for p in &curve.points {
        y_min = y_min.min(p.value - p.halfwidth);
        y_max = y_max.max(p.value + p.halfwidth);
    }
    let t_pad = (t_max - t_min).abs().max(1e-12) * 0.05;
    let y_pad = (y_max - y_min).abs().max(1e-12 * (1.0 + y_max.abs())) * 0.08;
    let (t_lo, t_hi) = (t_min - t_pad, t_max + t_pad);
    let (y_lo, y_hi) = (y_min - y_pad, y_max + y_pad);
    let map_x = |t: f64| MARGIN_LEFT + (t - t_lo) / (t_hi - t_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let map_y =
        |y: f64| HEIGHT - MARGIN_BOTTOM - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM);

    // Axes along the plot edges with range labels at the corners.
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        svg,
        "  <line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{x0:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\">t = {:.6}</text>",
        y0 + 20.0,
        t_min
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\" \
         text-anchor=\"end\">t = {:.6}</text>",
        x1,
        y0 + 20.0,
        t_max
    );
    let _ = writeln!(
        svg,
        "  <text x=\"5\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\">{:.6}</text>",
        map_y(y_min),
        y_min
    );
    let _ = writeln!(
        svg,
        "  <text x=\"5\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\">{:.6}</text>",
        map_y(y_max),
        y_max
    );

    for p in &curve.points {
        let x = map_x(p.t);
        let _ = writeln!(
            svg,
            "  <line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"gray\"/>",
            map_y(p.value - p.halfwidth),
            map_y(p.value + p.halfwidth)
        );
    }
    let polyline: Vec<String> = curve
        .points
        .iter()
        .map(|p| format!("{:.2},{:.2}", map_x(p.t), map_y(p.value)))
        .collect();
    let _ = writeln!(
        svg,
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>",
        polyline.join(" ")
    );
    for p in &curve.points {
        let _ = writeln!(
            svg,
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>",
            map_x(p.t),
            map_y(p.value)
        );
    }
    for &idx in &curve.violations {
        if let Some(p) = curve.points.get(idx) {
            let _ = writeln!(
                svg,
                "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"6\" fill=\"none\" stroke=\"red\" \
                 stroke-width=\"2\"/>",
                map_x(p.t),
                map_y(p.value)
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(path: &Path, curve: &NamedCurve) -> std::io::Result<()> {
    std::fs::write(path, curve_svg(curve))
}
