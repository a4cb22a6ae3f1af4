//! Static SVG rendering of a gap report.
//!
//! Top row: one panel per metric with a bar per space (raw, latent).
//! Bottom: normalized frame statistics of both datasets as grouped bars.

use std::fmt::Write as _;
use std::path::Path;

use crate::commands::GapFileReport;
use crate::error::{CliError, CliResult};

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 640.0;
const PANEL_W: f64 = 210.0;
const PANEL_H: f64 = 220.0;
const TOP: f64 = 70.0;
const STATS_TOP: f64 = 380.0;
const STATS_H: f64 = 200.0;
const RAW_COLOR: &str = "#4c72b0";
const LATENT_COLOR: &str = "#dd8452";
const A_COLOR: &str = "#55a868";
const B_COLOR: &str = "#c44e52";

type MetricGetter = fn(&dt_lidar_core::metrics::GapReport) -> f64;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn fmt_value(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (1e-3..1e4).contains(&v.abs()) {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

pub fn render_svg(report: &GapFileReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="20" y="30" font-size="16">Distribution gap: {} vs {}</text>"#,
        escape(&report.datasets.a),
        escape(&report.datasets.b)
    );

    let mut spaces = vec![("raw", &report.raw, RAW_COLOR)];
    if let Some(latent) = &report.latent {
        spaces.push(("latent", latent, LATENT_COLOR));
    }
    let metrics: [(&str, &str, MetricGetter); 4] = [
        ("cd", "Chamfer", |r| r.cd),
        ("mmd", "MMD", |r| r.mmd),
        ("emd", "EMD", |r| r.emd),
        ("fd", "Fréchet", |r| r.fd),
    ];

    for (m, (key, title, get)) in metrics.iter().enumerate() {
        let x0 = 20.0 + m as f64 * (PANEL_W + 25.0);
        let _ = writeln!(s, r#"<g class="metric-panel" data-metric="{key}">"#);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="14">{title}</text>"#, x0, TOP - 10.0);
        let _ = writeln!(
            s,
            r##"<line x1="{x0:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#333"/>"##,
            TOP + PANEL_H,
            x0 + PANEL_W,
            TOP + PANEL_H
        );
        let max = spaces.iter().map(|(_, r, _)| get(r)).fold(0.0, f64::max);
        let bar_w = PANEL_W / (spaces.len() as f64 * 1.5 + 0.5);
        for (k, (space, r, color)) in spaces.iter().enumerate() {
            let v = get(r);
            let h = if max > 0.0 { v / max * (PANEL_H - 20.0) } else { 0.0 };
            let x = x0 + bar_w * (0.5 + 1.5 * k as f64);
            let y = TOP + PANEL_H - h;
            let _ = writeln!(
                s,
                r#"<rect class="metric-bar" data-space="{space}" data-metric="{key}" data-value="{v}" x="{x:.1}" y="{y:.1}" width="{bar_w:.1}" height="{h:.1}" fill="{color}"/>"#
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                x + bar_w / 2.0,
                y - 4.0,
                fmt_value(v)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{space}</text>"#,
                x + bar_w / 2.0,
                TOP + PANEL_H + 15.0
            );
        }
        let _ = writeln!(s, "</g>");
    }

    let n = &report.stats.normalized;
    let stats = [
        ("point_count", "points / frame", n.point_count),
        ("box_count", "boxes / frame", n.box_count),
        ("mean_box_volume", "mean box volume", n.mean_box_volume),
    ];
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.1}" font-size="14">Normalized frame statistics</text>"#,
        STATS_TOP - 20.0
    );
    let _ = writeln!(s, r#"<g class="stats-panel">"#);
    let group_w = 280.0;
    let bar_w = 70.0;
    for (g, (key, title, (va, vb))) in stats.iter().enumerate() {
        let x0 = 40.0 + g as f64 * (group_w + 20.0);
        for (k, (who, v, color)) in [("a", *va, A_COLOR), ("b", *vb, B_COLOR)].into_iter().enumerate() {
            let h = v * STATS_H;
            let x = x0 + 50.0 + k as f64 * (bar_w + 20.0);
            let y = STATS_TOP + STATS_H - h;
            let _ = writeln!(
                s,
                r#"<rect class="stat-bar" data-dataset="{who}" data-metric="{key}" data-value="{v}" x="{x:.1}" y="{y:.1}" width="{bar_w:.1}" height="{h:.1}" fill="{color}"/>"#
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{v:.3}</text>"#,
                x + bar_w / 2.0,
                y - 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{title}</text>"#,
            x0 + 50.0 + bar_w + 10.0,
            STATS_TOP + STATS_H + 18.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" fill="{A_COLOR}">a: {}</text><text x="{:.1}" y="{:.1}" fill="{B_COLOR}">b: {}</text>"#,
        WIDTH - 260.0,
        30.0,
        escape(&report.datasets.a),
        WIDTH - 260.0,
        46.0,
        escape(&report.datasets.b)
    );
    s.push_str("</svg>\n");
    s
}

/// Renders the report JSON at `json` into an SVG file at `out`.
pub fn cmd_report(json: &Path, out: &Path) -> CliResult<()> {
    let report = GapFileReport::load(json)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(out, render_svg(&report)).map_err(|e| CliError::io(out, e))
}
