//! Deterministic SVG 1.1 scatter plots.
//!
//! Every data point becomes exactly one element with `class="marker"`;
//! legend swatches use `class="legend-marker"` so they never count as data.

use std::fmt::Write as _;

use super::{Format, RenderSpec, ReportError, Scale};

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 620.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSeries {
    pub label: String,
    pub points: Vec<ScatterPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Draw the y = x line.
    pub guide_line: bool,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            title: "Firm values: FV1 vs FV2".into(),
            x_label: "FV2 (m€)".into(),
            y_label: "FV1 (m€)".into(),
            guide_line: true,
        }
    }
}

/// Value on the plot's axis: `log10(v)` or `v` itself.
pub fn axis_coordinate(value: f64, scale: Scale) -> Result<f64, ReportError> {
    match scale {
        Scale::Linear => Ok(value),
        Scale::Log10 if value > 0.0 => Ok(value.log10()),
        Scale::Log10 => Err(ReportError::NonPositiveLogInput {
            series: String::new(),
            label: String::new(),
            value,
        }),
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn tick_label(v: f64) -> String {
    let s = super::fixed(v, 6);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Axis range shared by x and y (in axis coordinates) and the tick positions.
fn axis_range(lo: f64, hi: f64, scale: Scale) -> (f64, f64, Vec<(f64, String)>) {
    match scale {
        Scale::Log10 => {
            let a = lo.floor();
            let mut b = hi.ceil();
            if b <= a {
                b = a + 1.0;
            }
            let ticks = (a as i32..=b as i32)
                .map(|e| (e as f64, tick_label(10f64.powi(e))))
                .collect();
            (a, b, ticks)
        }
        Scale::Linear => {
            let lo = lo.min(0.0);
            let hi = if hi <= lo { lo + 1.0 } else { hi };
            let step = nice_step(hi - lo);
            let a = (lo / step).floor() * step;
            let b = (hi / step).ceil() * step;
            let n = ((b - a) / step).round() as i64;
            let ticks = (0..=n)
                .map(|i| {
                    let v = a + i as f64 * step;
                    (v, tick_label(v))
                })
                .collect();
            (a, b, ticks)
        }
    }
}

fn marker(shape: usize, cx: f64, cy: f64, class: &str, color: &str, series: usize) -> (String, &'static str) {
    let r = 4.5;
    match shape % 4 {
        0 => (
            format!(r#"<circle class="{class}" data-series="{series}" cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{color}""#),
            "circle",
        ),
        1 => (
            format!(
                r#"<rect class="{class}" data-series="{series}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}""#,
                cx - r,
                cy - r,
                2.0 * r,
                2.0 * r
            ),
            "rect",
        ),
        2 => (
            format!(
                r#"<polygon class="{class}" data-series="{series}" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}""#,
                cx,
                cy - r - 1.0,
                cx - r,
                cy + r,
                cx + r,
                cy + r
            ),
            "polygon",
        ),
        _ => (
            format!(
                r#"<polygon class="{class}" data-series="{series}" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}""#,
                cx,
                cy - r - 1.0,
                cx + r + 1.0,
                cy,
                cx,
                cy + r + 1.0,
                cx - r - 1.0,
                cy
            ),
            "polygon",
        ),
    }
}

/// Renders the series as a scatter plot. `spec.format` must be SVG.
pub fn emit_scatter(series: &[ScatterSeries], spec: &RenderSpec, opts: &PlotOptions) -> Result<String, ReportError> {
    if spec.format != Format::Svg {
        return Err(ReportError::UnsupportedFormat {
            format: spec.format,
            what: "scatter plots",
        });
    }
    let mut coords: Vec<Vec<(f64, f64)>> = Vec::with_capacity(series.len());
    for s in series {
        let mut pts = Vec::with_capacity(s.points.len());
        for p in &s.points {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(ReportError::NonFinite {
                    series: s.label.clone(),
                    label: p.label.clone(),
                });
            }
            let map = |v: f64| {
                axis_coordinate(v, spec.scale).map_err(|_| ReportError::NonPositiveLogInput {
                    series: s.label.clone(),
                    label: p.label.clone(),
                    value: v,
                })
            };
            pts.push((map(p.x)?, map(p.y)?));
        }
        coords.push(pts);
    }
    let all = coords.iter().flatten().flat_map(|&(x, y)| [x, y]);
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let (a, b, ticks) = axis_range(lo, hi, spec.scale);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + (v - a) / (b - a) * plot_w;
    let py = |v: f64| TOP + plot_h - (v - a) / (b - a) * plot_h;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&opts.title));
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&opts.title)
    );

    // Axes, grid and ticks.
    s.push_str("<g class=\"axes\" stroke=\"#333\" stroke-width=\"1\">\n");
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
        LEFT,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    let _ = writeln!(s, r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}"/>"#, TOP + plot_h);
    for (v, _) in &ticks {
        let (x, y) = (px(*v), py(*v));
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/>"#, TOP + plot_h, TOP + plot_h + 5.0);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}"/>"#, LEFT - 5.0);
        let _ = writeln!(
            s,
            r##"<line class="grid" x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##,
            TOP + plot_h
        );
        let _ = writeln!(
            s,
            r##"<line class="grid" x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##,
            LEFT + plot_w
        );
    }
    s.push_str("</g>\n<g class=\"tick-labels\" fill=\"#333\">\n");
    for (v, label) in &ticks {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(*v),
            TOP + plot_h + 20.0,
            escape(label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            py(*v) + 4.0,
            escape(label)
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 20.0,
        escape(&opts.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&opts.y_label)
    );

    if opts.guide_line {
        let _ = writeln!(
            s,
            r##"<line class="guide" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="6 4"/>"##,
            px(a),
            py(a),
            px(b),
            py(b)
        );
        let _ = writeln!(
            s,
            r##"<text class="guide-label" x="{:.2}" y="{:.2}" text-anchor="end" fill="#888">FV1/FV2 = 100%</text>"##,
            px(b) - 4.0,
            py(b) + 14.0
        );
    }

    for (i, (ser, pts)) in series.iter().zip(&coords).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(s, r#"<g class="series" data-label="{}">"#, escape(&ser.label));
        for (p, &(x, y)) in ser.points.iter().zip(pts) {
            let (open, tag) = marker(i, px(x), py(y), "marker", color, i);
            let _ = writeln!(
                s,
                "{open}><title>{} ({}, {})</title></{tag}>",
                escape(&p.label),
                super::fixed(p.x, 2),
                super::fixed(p.y, 2)
            );
        }
        s.push_str("</g>\n");
    }

    s.push_str("<g class=\"legend\">\n");
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let ly = TOP + 10.0 + 22.0 * i as f64;
        let lx = WIDTH - RIGHT + 25.0;
        let (open, _) = marker(i, lx, ly, "legend-marker", color, i);
        let _ = writeln!(s, "{open}/>");
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{} (n = {})</text>"#,
            lx + 12.0,
            ly + 4.0,
            escape(&ser.label),
            ser.points.len()
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}
