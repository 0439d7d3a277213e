//! Minimal self-contained SVG plot rendering (scatter + line, optional log
//! axes). No font rasterization or external assets, so output bytes are
//! fully deterministic.

use std::fmt::Write as _;
use std::path::Path;

pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

pub struct PlotSpec<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_x: bool,
    pub log_y: bool,
}

const W: f64 = 720.0;
const H: f64 = 480.0;
const ML: f64 = 80.0;
const MR: f64 = 30.0;
const MT: f64 = 44.0;
const MB: f64 = 56.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn tf(v: f64, log: bool) -> f64 {
    if log {
        v.max(1e-300).log10()
    } else {
        v
    }
}

pub fn render(spec: &PlotSpec<'_>, series: &[Series], path: &Path) -> std::io::Result<()> {
    let mut xs_all = Vec::new();
    let mut ys_all = Vec::new();
    for s in series {
        for (&x, &y) in s.xs.iter().zip(&s.ys) {
            if x.is_finite() && y.is_finite() && (!spec.log_y || y > 0.0) && (!spec.log_x || x > 0.0)
            {
                xs_all.push(tf(x, spec.log_x));
                ys_all.push(tf(y, spec.log_y));
            }
        }
    }
    let (x0, x1) = span(&xs_all);
    let (y0, y1) = span(&ys_all);
    let px = |x: f64| ML + (tf(x, spec.log_x) - x0) / (x1 - x0) * (W - ML - MR);
    let py = |y: f64| H - MB - (tf(y, spec.log_y) - y0) / (y1 - y0) * (H - MT - MB);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="monospace" font-size="16" text-anchor="middle">{}</text>"#,
        W / 2.0,
        xml(spec.title)
    );
    // frame
    let _ = writeln!(
        svg,
        r##"<rect x="{ML}" y="{MT}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        W - ML - MR,
        H - MT - MB
    );
    // ticks (5 per axis in transformed coordinates)
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let tx = ML + (W - ML - MR) * k as f64 / 4.0;
        let ty = H - MB - (H - MT - MB) * k as f64 / 4.0;
        let lx = if spec.log_x { 10f64.powf(fx) } else { fx };
        let ly = if spec.log_y { 10f64.powf(fy) } else { fy };
        let _ = writeln!(
            svg,
            r##"<line x1="{tx}" y1="{}" x2="{tx}" y2="{}" stroke="#444"/>"##,
            H - MB,
            H - MB + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{tx}" y="{}" font-family="monospace" font-size="11" text-anchor="middle">{}</text>"#,
            H - MB + 18.0,
            fmt_tick(lx)
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{ty}" x2="{ML}" y2="{ty}" stroke="#444"/>"##,
            ML - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="11" text-anchor="end">{}</text>"#,
            ML - 8.0,
            ty + 4.0,
            fmt_tick(ly)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="monospace" font-size="13" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 14.0,
        xml(spec.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" font-family="monospace" font-size="13" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        xml(spec.y_label)
    );

    for (si, s) in series.iter().enumerate() {
        let color = COLORS[si % COLORS.len()];
        let mut d = String::new();
        let mut first = true;
        for (&x, &y) in s.xs.iter().zip(&s.ys) {
            if !x.is_finite() || !y.is_finite() || (spec.log_y && y <= 0.0) {
                continue;
            }
            let _ = write!(d, "{}{},{} ", if first { "M" } else { "L" }, px(x), py(y));
            first = false;
        }
        let _ = writeln!(
            svg,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            d.trim_end()
        );
        for (&x, &y) in s.xs.iter().zip(&s.ys) {
            if !x.is_finite() || !y.is_finite() || (spec.log_y && y <= 0.0) {
                continue;
            }
            let _ = writeln!(
                svg,
                r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="12" fill="{color}">{}</text>"#,
            ML + 10.0,
            MT + 18.0 + 16.0 * si as f64,
            xml(&s.label)
        );
    }
    let _ = writeln!(svg, "</svg>");
    std::fs::write(path, svg)
}

fn span(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 0.01 && v.abs() < 1e4 {
        format!("{v:.3}")
    } else {
        format!("{v:.1e}")
    }
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
