//! Plain SVG heatmaps and line plots.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

// viridis at five stops
const STOPS: [(f64, f64, f64); 5] =
    [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];

fn color(s: f64) -> String {
    let s = if s.is_finite() { s.clamp(0.0, 1.0) } else { 0.0 };
    let x = s * (STOPS.len() - 1) as f64;
    let k = (x.floor() as usize).min(STOPS.len() - 2);
    let f = x - k as f64;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    let mix = |p: f64, q: f64| (p + f * (q - p)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn range(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = xs.filter(|x| x.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn header(out: &mut String, title: &str) {
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title)).unwrap();
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), xlabel: &str, ylabel: &str) {
    let (w, h) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{w}" height="{h}" fill="none" stroke="black"/>"#).unwrap();
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let px = LEFT + f * w;
        let py = TOP + h - f * h;
        let vx = x.0 + f * (x.1 - x.0);
        let vy = y.0 + f * (y.1 - y.0);
        writeln!(out, r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{vx:.3}</text>"#, TOP + h + 16.0).unwrap();
        writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{vy:.3}</text>"#, LEFT - 6.0, py + 4.0).unwrap();
    }
    writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, LEFT + w / 2.0, HEIGHT - 10.0, escape(xlabel)).unwrap();
    writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        TOP + h / 2.0,
        TOP + h / 2.0,
        escape(ylabel)
    )
    .unwrap();
}

/// `values[k][i]` is drawn at time `times[k]` and position `positions[i]`.
pub fn heatmap(title: &str, times: &[f64], positions: &[f64], values: &[Vec<f64>], label: &str) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let tx = range(times.iter().copied());
    let py = range(positions.iter().copied());
    let vz = range(values.iter().flatten().copied());
    axes(&mut out, tx, py, "time", "position");
    let (w, h) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let cw = w / times.len().max(1) as f64;
    let ch = h / positions.len().max(1) as f64;
    for (k, row) in values.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let x = LEFT + k as f64 * cw;
            let y = TOP + h - (i + 1) as f64 * ch;
            let c = color((v - vz.0) / (vz.1 - vz.0));
            writeln!(out, r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{c}"/>"#, cw + 0.05, ch + 0.05).unwrap();
        }
    }
    let bx = WIDTH - RIGHT + 20.0;
    for k in 0..50 {
        let f = k as f64 / 49.0;
        let y = TOP + h - (k + 1) as f64 * h / 50.0;
        writeln!(out, r#"<rect x="{bx}" y="{y:.2}" width="16" height="{:.2}" fill="{}"/>"#, h / 50.0 + 0.05, color(f)).unwrap();
    }
    writeln!(out, r#"<text x="{:.1}" y="{:.1}">{:.3}</text>"#, bx + 20.0, TOP + h, vz.0).unwrap();
    writeln!(out, r#"<text x="{:.1}" y="{:.1}">{:.3}</text>"#, bx + 20.0, TOP + 10.0, vz.1).unwrap();
    writeln!(out, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, bx, TOP - 6.0, escape(label)).unwrap();
    out.push_str("</svg>\n");
    out
}

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    /// Draw markers instead of a line.
    pub markers: bool,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#555555"];

pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let xr = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let yr = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    axes(&mut out, xr, yr, xlabel, ylabel);
    let (w, h) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let map = |(x, y): (f64, f64)| (LEFT + (x - xr.0) / (xr.1 - xr.0) * w, TOP + h - (y - yr.0) / (yr.1 - yr.0) * h);
    for (k, s) in series.iter().enumerate() {
        let c = PALETTE[k % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s.points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite()).map(map).collect();
        if s.markers {
            for (x, y) in &pts {
                writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="none" stroke="{c}" stroke-width="2"/>"#).unwrap();
            }
        } else if !pts.is_empty() {
            let d: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            writeln!(out, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, d.join(" ")).unwrap();
        }
        let ly = TOP + 14.0 + 16.0 * k as f64;
        writeln!(out, r#"<text x="{:.1}" y="{ly:.1}" fill="{c}">{}</text>"#, WIDTH - RIGHT + 8.0, escape(s.label)).unwrap();
    }
    out.push_str("</svg>\n");
    out
}
