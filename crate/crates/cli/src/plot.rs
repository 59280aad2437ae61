//! Minimal SVG line charts: fixed 800×400 viewBox, auto-scaled axes, one
//! polyline per series, legend from the series names.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 40.0;
const COLORS: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

pub struct Chart<'a> {
    pub title: &'a str,
    pub series: Vec<(&'a str, &'a [f64])>,
    /// Sample indices drawn as vertical markers.
    pub markers: Vec<usize>,
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
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

/// Value range over all finite samples, widened when flat.
fn y_range(series: &[(&str, &[f64])]) -> (f64, f64) {
    let (lo, hi) = series
        .iter()
        .flat_map(|(_, ys)| ys.iter().copied())
        .filter(|y| y.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| {
            (lo.min(y), hi.max(y))
        });
    if lo > hi {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * hi.abs().max(lo.abs()).max(1e-300) {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn label(x: f64) -> String {
    if x == 0.0 || (1e-3..1e6).contains(&x.abs()) {
        let s = format!("{x:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".to_string()
        } else {
            s.to_string()
        }
    } else {
        format!("{x:.3e}")
    }
}

impl Chart<'_> {
    pub fn render(&self) -> String {
        let n = self
            .series
            .iter()
            .map(|(_, ys)| ys.len())
            .max()
            .unwrap_or(0);
        let (lo, hi) = y_range(&self.series);
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let x_of = |k: usize| LEFT + plot_w * k as f64 / (n.max(2) - 1) as f64;
        let y_of = |y: f64| TOP + plot_h * (hi - y) / (hi - lo);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(
            svg,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="18" text-anchor="middle" font-size="13">{}</text>"#,
            WIDTH / 2.0,
            escape(self.title)
        );
        let _ = writeln!(
            svg,
            r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444"/>"##
        );

        for i in 0..=4 {
            let y = lo + (hi - lo) * i as f64 / 4.0;
            let py = y_of(y);
            let _ = writeln!(
                svg,
                r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                WIDTH - RIGHT,
                LEFT - 5.0,
                py + 4.0,
                label(y)
            );
        }
        for i in 0..=4 {
            let k = (n.max(1) - 1) * i / 4;
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{k}</text>"#,
                x_of(k),
                HEIGHT - BOTTOM + 16.0
            );
        }

        for &k in &self.markers {
            let px = x_of(k);
            let _ = writeln!(
                svg,
                r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
                TOP + plot_h
            );
        }

        for (j, (name, ys)) in self.series.iter().enumerate() {
            let color = COLORS[j % COLORS.len()];
            let mut points = String::new();
            for (k, &y) in ys.iter().enumerate().filter(|(_, y)| y.is_finite()) {
                if !points.is_empty() {
                    points.push(' ');
                }
                let _ = write!(points, "{:.2},{:.2}", x_of(k), y_of(y));
            }
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{points}"><title>{}</title></polyline>"#,
                escape(name)
            );
            let ly = TOP + 14.0 + 16.0 * j as f64;
            let lx = LEFT + 10.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{lx}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{}" y="{ly:.2}">{}</text>"#,
                ly - 4.0,
                lx + 18.0,
                ly - 4.0,
                lx + 24.0,
                escape(name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).with_context(|| format!("writing {}", path.display()))
    }
}
