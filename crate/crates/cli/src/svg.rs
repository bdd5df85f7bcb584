//! Minimal SVG line plots: one panel per state variable, one curve per order.

use std::fmt::Write;

use crate::run::OrderRun;

const PANEL_W: f64 = 440.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 78.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 44.0;
const LEGEND_H: f64 = 34.0;
const MAX_POINTS: usize = 1500;
const COLORS: [&str; 8] = [
    "#1f4fa8", "#c0392b", "#2e8b57", "#111111", "#8e44ad", "#d68910", "#17a2b8", "#7f8c8d",
];

pub struct Curve {
    pub label: String,
    pub t: Vec<f64>,
    pub y: Vec<f64>,
}

pub struct Panel {
    pub title: String,
    pub curves: Vec<Curve>,
}

/// Node indices to draw: uniform in index, or geometric when the time axis
/// is logarithmic (node 0 dropped since `t = 0`).
fn sample_indices(n: usize, log_time: bool) -> Vec<usize> {
    if n <= MAX_POINTS {
        return (usize::from(log_time)..n).collect();
    }
    let mut idx: Vec<usize> = if log_time {
        let top = ((n - 1) as f64).ln();
        (0..MAX_POINTS)
            .map(|i| (top * i as f64 / (MAX_POINTS - 1) as f64).exp().round() as usize)
            .collect()
    } else {
        (0..MAX_POINTS).map(|i| i * (n - 1) / (MAX_POINTS - 1)).collect()
    };
    idx.dedup();
    idx
}

pub fn panels_from_runs(labels: &[&str], runs: &[OrderRun], log_time: bool) -> Vec<Panel> {
    labels
        .iter()
        .enumerate()
        .map(|(c, label)| Panel {
            title: label.to_string(),
            curves: runs
                .iter()
                .map(|r| {
                    let tr = &r.trajectory;
                    let idx = sample_indices(tr.len(), log_time);
                    Curve {
                        label: format!("θ = {}", r.theta),
                        t: idx.iter().map(|&k| tr.grid.time(k)).collect(),
                        y: idx.iter().map(|&k| tr.state(k)[c]).collect(),
                    }
                })
                .collect(),
        })
        .collect()
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".into()
    } else if (1e-2..1e5).contains(&a) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        let pad = 0.5 * hi.abs().max(1.0);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn draw_panel(out: &mut String, panel: &Panel, x0: f64, y0: f64, log_time: bool) {
    let tx = |t: f64| if log_time { t.log10() } else { t };
    let (xmin, xmax) = range(panel.curves.iter().flat_map(|c| c.t.iter().map(|&t| tx(t))));
    let (ymin, ymax) = range(panel.curves.iter().flat_map(|c| c.y.iter().copied()));
    let pw = PANEL_W - MARGIN_L - MARGIN_R;
    let ph = PANEL_H - MARGIN_T - MARGIN_B;
    let px = |x: f64| x0 + MARGIN_L + (x - xmin) / (xmax - xmin) * pw;
    let py = |y: f64| y0 + MARGIN_T + (ymax - y) / (ymax - ymin) * ph;

    let _ = writeln!(
        out,
        r#"<rect x="{:.1}" y="{:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="dimgray"/>"#,
        x0 + MARGIN_L,
        y0 + MARGIN_T
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="14">{}</text>"#,
        x0 + MARGIN_L + pw / 2.0,
        y0 + MARGIN_T - 10.0,
        panel.title
    );
    for i in 0..=4 {
        let fy = ymin + (ymax - ymin) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="10">{}</text>"#,
            x0 + MARGIN_L - 4.0,
            py(fy) + 3.0,
            tick_label(fy)
        );
        let fx = xmin + (xmax - xmin) * i as f64 / 4.0;
        let shown = if log_time { 10f64.powf(fx) } else { fx };
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10">{}</text>"#,
            px(fx),
            y0 + MARGIN_T + ph + 14.0,
            tick_label(shown)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11">{}</text>"#,
        x0 + MARGIN_L + pw / 2.0,
        y0 + MARGIN_T + ph + 32.0,
        if log_time { "t (log scale)" } else { "t" }
    );
    for (ci, c) in panel.curves.iter().enumerate() {
        let mut d = String::new();
        for (t, y) in c.t.iter().zip(&c.y) {
            let (x, y) = (px(tx(*t)), py(*y));
            if x.is_finite() && y.is_finite() {
                let _ = write!(d, "{}{x:.2},{y:.2}", if d.is_empty() { "M" } else { " L" });
            }
        }
        let _ = writeln!(
            out,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.4"/>"#,
            COLORS[ci % COLORS.len()]
        );
    }
}

pub fn render(panels: &[Panel], log_time: bool) -> String {
    let cols = 2usize;
    let rows = panels.len().div_ceil(cols);
    let width = PANEL_W * cols as f64;
    let height = LEGEND_H + PANEL_H * rows as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(first) = panels.first() {
        for (ci, c) in first.curves.iter().enumerate() {
            let x = 20.0 + 130.0 * ci as f64;
            let color = COLORS[ci % COLORS.len()];
            let _ = writeln!(
                out,
                r#"<line x1="{x}" y1="18" x2="{}" y2="18" stroke="{color}" stroke-width="2"/><text x="{}" y="22" font-size="12">{}</text>"#,
                x + 24.0,
                x + 30.0,
                c.label
            );
        }
    }
    for (i, p) in panels.iter().enumerate() {
        let x0 = PANEL_W * (i % cols) as f64;
        let y0 = LEGEND_H + PANEL_H * (i / cols) as f64;
        draw_panel(&mut out, p, x0, y0, log_time);
    }
    out.push_str("</svg>\n");
    out
}
