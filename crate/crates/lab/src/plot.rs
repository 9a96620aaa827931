//! Minimal SVG learning-curve chart with confidence bands.

use std::fmt::Write as _;

use anyhow::{bail, Result};

use crate::stats::Interval;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub band: &'a [Interval],
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
/// Points drawn per curve.
const MAX_POINTS: usize = 500;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
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

fn sampled(len: usize) -> Vec<usize> {
    if len <= MAX_POINTS {
        return (0..len).collect();
    }
    (0..MAX_POINTS).map(|i| i * (len - 1) / (MAX_POINTS - 1)).collect()
}

pub fn render_svg(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> Result<String> {
    let Some(len) = series.first().map(|s| s.band.len()) else {
        bail!("nothing to plot");
    };
    if len == 0 || series.iter().any(|s| s.band.len() != len) {
        bail!("series must be non-empty and equally long");
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for iv in series.iter().flat_map(|s| s.band) {
        if iv.lo().is_finite() && iv.hi().is_finite() {
            lo = lo.min(iv.lo());
            hi = hi.max(iv.hi());
        }
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo, hi) = (lo - 0.5, hi + 0.5);
    }
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let x = |t: usize| MARGIN + pw * t as f64 / (len.max(2) - 1) as f64;
    let y = |v: f64| MARGIN + ph * (1.0 - (v - lo) / (hi - lo));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{v:.2}</text>"#,
            MARGIN - 6.0,
            y(v) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{}">0</text><text x="{}" y="{}" text-anchor="end">{}</text>"#,
        HEIGHT - MARGIN + 16.0,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16.0,
        len.saturating_sub(1)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );

    for (n, s) in series.iter().enumerate() {
        let idx = sampled(s.band.len());
        let color = escape(s.color);
        if !idx.is_empty() {
            let mut poly = String::new();
            for &t in &idx {
                let _ = write!(poly, "{:.2},{:.2} ", x(t), y(s.band[t].hi()));
            }
            for &t in idx.iter().rev() {
                let _ = write!(poly, "{:.2},{:.2} ", x(t), y(s.band[t].lo()));
            }
            let _ = writeln!(
                svg,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                poly.trim_end()
            );
            let line: Vec<String> = idx
                .iter()
                .map(|&t| format!("{:.2},{:.2}", x(t), y(s.band[t].mean)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                line.join(" ")
            );
        }
        let ly = MARGIN + 16.0 + 18.0 * n as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/><text x="{}" y="{}">{}</text>"#,
            MARGIN + 10.0,
            MARGIN + 30.0,
            MARGIN + 36.0,
            ly + 4.0,
            escape(s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
