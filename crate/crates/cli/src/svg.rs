//! Minimal scatter-plot SVG writer.

use std::fmt::Write;

const PANEL: f64 = 360.0;
const PAD: f64 = 48.0;
const RADIUS: f64 = 2.0;

pub struct Panel<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Data range widened by 5% on each side; a zero-width range becomes ±0.5.
fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w = hi - lo;
    if w > 0.0 {
        (lo - 0.05 * w, hi + 0.05 * w)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn fmt_tick(v: f64) -> String {
    format!("{:.3}", v)
}

/// Panels laid out left to right, one circle per point.
pub fn scatter(panels: &[Panel]) -> String {
    let width = panels.len() as f64 * (PANEL + 2.0 * PAD);
    let height = PANEL + 2.0 * PAD;
    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    for (i, p) in panels.iter().enumerate() {
        let ox = i as f64 * (PANEL + 2.0 * PAD) + PAD;
        let oy = PAD;
        let (x0, x1) = bounds(p.x);
        let (y0, y1) = bounds(p.y);
        let sx = |v: f64| ox + (v - x0) / (x1 - x0) * PANEL;
        let sy = |v: f64| oy + PANEL - (v - y0) / (y1 - y0) * PANEL;
        writeln!(s, r#"<g class="panel" id="panel-{i}">"#).unwrap();
        writeln!(
            s,
            r#"<rect x="{ox}" y="{oy}" width="{PANEL}" height="{PANEL}" fill="none" stroke="black"/>"#
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
            ox + PANEL / 2.0,
            oy - 16.0,
            escape(p.title)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            ox + PANEL / 2.0,
            oy + PANEL + 34.0,
            escape(p.x_label)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">{}</text>"#,
            ox - 34.0,
            oy + PANEL / 2.0,
            ox - 34.0,
            oy + PANEL / 2.0,
            escape(p.y_label)
        )
        .unwrap();
        for (v, anchor, x, y) in [
            (x0, "start", ox, oy + PANEL + 14.0),
            (x1, "end", ox + PANEL, oy + PANEL + 14.0),
        ] {
            writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{}</text>"#, fmt_tick(v)).unwrap();
        }
        for (v, y) in [(y0, oy + PANEL), (y1, oy + 10.0)] {
            writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#, ox - 4.0, fmt_tick(v)).unwrap();
        }
        for (&a, &b) in p.x.iter().zip(p.y) {
            writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{RADIUS}" fill="steelblue" fill-opacity="0.7"/>"#,
                sx(a),
                sy(b)
            )
            .unwrap();
        }
        writeln!(s, "</g>").unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    s
}
