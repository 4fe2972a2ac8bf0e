//! Standalone SVG 1.1 line plots with a logarithmic y axis.

use std::fmt::Write as _;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf",
];

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_T: f64 = 40.0;
const GAP: f64 = 90.0;
const LEGEND_ROW: f64 = 18.0;

/// One curve: `(x, y)` pairs, nonpositive `y` clamped to the axis floor.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

pub fn escape(s: &str) -> String {
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

/// Smallest value drawn on a log axis.
pub const LOG_FLOOR: f64 = 1e-16;

/// Panels side by side with a shared legend naming every series of the first panel.
pub fn render(title: &str, panels: &[Panel]) -> String {
    let legend: Vec<&str> = panels
        .first()
        .map(|p| p.series.iter().map(|s| s.name.as_str()).collect())
        .unwrap_or_default();
    let n = panels.len().max(1) as f64;
    let width = MARGIN_L + n * PANEL_W + (n - 1.0) * GAP + 30.0;
    let height = MARGIN_T + PANEL_H + 60.0 + LEGEND_ROW * legend.len() as f64 + 10.0;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    for (i, panel) in panels.iter().enumerate() {
        let x0 = MARGIN_L + i as f64 * (PANEL_W + GAP);
        draw_panel(&mut s, panel, x0, MARGIN_T);
    }
    let ly = MARGIN_T + PANEL_H + 50.0;
    let _ = writeln!(s, r#"<g class="legend">"#);
    for (k, name) in legend.iter().enumerate() {
        let y = ly + k as f64 * LEGEND_ROW;
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<line x1="{MARGIN_L}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            MARGIN_L + 30.0,
            MARGIN_L + 38.0,
            y + 4.0,
            escape(name)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

fn draw_panel(s: &mut String, panel: &Panel, x0: f64, y0: f64) {
    let pts = || panel.series.iter().flat_map(|se| se.points.iter());
    let x_max = pts().map(|p| p.0).fold(0.0, f64::max);
    let x_max = if x_max > 0.0 { x_max } else { 1.0 };
    let ys = || pts().map(|p| p.1.max(LOG_FLOOR)).filter(|y| y.is_finite());
    let lo = ys().fold(f64::INFINITY, f64::min);
    let hi = ys().fold(0.0, f64::max);
    let (dlo, mut dhi) = if lo.is_finite() { (lo.log10().floor(), hi.log10().ceil()) } else { (-1.0, 0.0) };
    if dhi <= dlo {
        dhi = dlo + 1.0;
    }
    let sx = |x: f64| x0 + x / x_max * PANEL_W;
    let sy = |y: f64| {
        let l = y.max(LOG_FLOOR).log10();
        y0 + (dhi - l) / (dhi - dlo) * PANEL_H
    };
    let _ = writeln!(s, "<g class=\"panel\">");
    let _ = writeln!(
        s,
        r#"<rect x="{x0:.1}" y="{y0:.1}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="black"/>"#
    );
    // decade grid lines, at most about ten labels
    let step = ((dhi - dlo) / 10.0).ceil().max(1.0);
    let mut d = dlo;
    while d <= dhi + 1e-9 {
        let y = y0 + (dhi - d) / (dhi - dlo) * PANEL_H;
        let _ = writeln!(
            s,
            r##"<line x1="{x0:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{d:.0}</text>"##,
            x0 + PANEL_W,
            x0 - 6.0,
            y + 4.0
        );
        d += step;
    }
    for k in 0..=4 {
        let xv = x_max * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(xv),
            y0 + PANEL_H + 16.0,
            tick_label(xv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        x0 + PANEL_W / 2.0,
        y0 + PANEL_H + 34.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        x0 - 50.0,
        y0 + PANEL_H / 2.0,
        x0 - 50.0,
        y0 + PANEL_H / 2.0,
        escape(&panel.y_label)
    );
    for (k, series) in panel.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut path = String::new();
        for &(x, y) in series.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
            let _ = write!(path, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            path.trim_end(),
            escape(&series.name)
        );
    }
    let _ = writeln!(s, "</g>");
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if !(0.01..1000.0).contains(&v) {
        format!("{v:.1e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}
