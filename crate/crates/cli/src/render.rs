//! SVG charts and pivoted plot tables from sweep CSVs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tofcov_core::sensors::ConfigLabel;

use crate::sweep::{read_rows, Row, SweepKind};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

/// One named series of (x, ζ) points.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn plot_w() -> f64 {
    WIDTH - LEFT - RIGHT
}

fn plot_h() -> f64 {
    HEIGHT - TOP - BOTTOM
}

fn y_of(zeta: f64) -> f64 {
    TOP + plot_h() * (1.0 - zeta.clamp(0.0, 100.0) / 100.0)
}

fn frame(svg: &mut String, title: &str, x_label: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));
    for k in 0..=5 {
        let z = 20.0 * f64::from(k);
        let y = y_of(z);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{z:.0}</text>"##,
            LEFT + plot_w(),
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        plot_w(),
        plot_h()
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">coverage ζ (%)</text>"#,
        TOP + plot_h() / 2.0,
        TOP + plot_h() / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w() / 2.0,
        HEIGHT - 14.0,
        escape(x_label)
    );
}

fn legend(svg: &mut String, names: &[String]) {
    for (i, n) in names.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let x = LEFT + plot_w() + 16.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.1}" y="{:.1}" width="12" height="12" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            y - 10.0,
            PALETTE[i % PALETTE.len()],
            x + 18.0,
            y,
            escape(n)
        );
    }
}

/// Grouped bars: one group per category, one bar per series.
pub fn bar_chart(title: &str, x_label: &str, categories: &[String], series: &[Series]) -> String {
    let mut svg = String::new();
    frame(&mut svg, title, x_label);
    let group_w = plot_w() / categories.len().max(1) as f64;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    for (c, cat) in categories.iter().enumerate() {
        let gx = LEFT + group_w * c as f64 + group_w * 0.1;
        for (s, ser) in series.iter().enumerate() {
            if let Some(&(_, z)) = ser.points.iter().find(|p| p.0 as usize == c) {
                let x = gx + bar_w * s as f64;
                let y = y_of(z);
                let _ = writeln!(
                    svg,
                    r#"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="{}"><title>{} {}: {z:.2}%</title></rect>"#,
                    bar_w * 0.95,
                    TOP + plot_h() - y,
                    PALETTE[s % PALETTE.len()],
                    escape(cat),
                    escape(&ser.name)
                );
            }
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + group_w * (c as f64 + 0.5),
            TOP + plot_h() + 18.0,
            escape(cat)
        );
    }
    legend(&mut svg, &series.iter().map(|s| s.name.clone()).collect::<Vec<_>>());
    svg.push_str("</svg>\n");
    svg
}

/// Polylines over a numeric x axis.
pub fn line_chart(title: &str, x_label: &str, series: &[Series]) -> String {
    let mut svg = String::new();
    frame(&mut svg, title, x_label);
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (lo, hi) = if lo.is_finite() && hi > lo { (lo, hi) } else { (0.0, 1.0) };
    let x_of = |x: f64| LEFT + plot_w() * (x - lo) / (hi - lo);
    let mut ticks: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for t in ticks {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t}</text>"#,
            x_of(t),
            TOP + plot_h() + 18.0
        );
    }
    for (s, ser) in series.iter().enumerate() {
        let color = PALETTE[s % PALETTE.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, z)| format!("{:.1},{:.1}", x_of(x), y_of(z))).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, pts.join(" "));
        for &(x, z) in &ser.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"><title>{} @ {x}: {z:.2}%</title></circle>"#,
                x_of(x),
                y_of(z),
                escape(&ser.name)
            );
        }
    }
    legend(&mut svg, &series.iter().map(|s| s.name.clone()).collect::<Vec<_>>());
    svg.push_str("</svg>\n");
    svg
}

fn vmax_name(r: &Row) -> String {
    format!("{}({})", r.vmax, r.r_param.trim_end_matches('0').trim_end_matches('.'))
}

/// Categories (configurations) and per-volume series for a config sweep.
pub fn config_series(rows: &[Row]) -> (Vec<String>, Vec<Series>) {
    let mut cats: Vec<String> = Vec::new();
    let mut by_vmax: BTreeMap<(u8, String), Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        if !cats.contains(&r.config) {
            cats.push(r.config.clone());
        }
    }
    for r in rows {
        if let Some(z) = r.zeta() {
            let c = cats.iter().position(|c| *c == r.config).unwrap_or(0);
            by_vmax.entry((vmax_rank(&r.vmax), vmax_name(r))).or_default().push((c as f64, z));
        }
    }
    let series = by_vmax.into_iter().map(|((_, name), points)| Series { name, points }).collect();
    (cats, series)
}

fn vmax_rank(tag: &str) -> u8 {
    ["VO", "VT", "VOT", "VS"].iter().position(|t| *t == tag).unwrap_or(4) as u8
}

/// ζ against tilt for every `n2_*_θ` row, one series per reference volume.
pub fn theta_series(rows: &[Row]) -> Vec<Series> {
    let mut map: BTreeMap<(u8, String), Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        let Ok(label) = r.config.parse::<ConfigLabel>() else { continue };
        if label.rings_per_link != 2 {
            continue;
        }
        if let Some(z) = r.zeta() {
            map.entry((vmax_rank(&r.vmax), vmax_name(r))).or_default().push((f64::from(label.tilt_deg), z));
        }
    }
    map.into_iter()
        .map(|((_, name), mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { name, points }
        })
        .collect()
}

fn pivot_csv(x_name: &str, series: &[Series], x_labels: Option<&[String]>) -> String {
    let mut xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut out = String::from(x_name);
    for s in series {
        out.push(',');
        out.push_str(&s.name);
    }
    out.push('\n');
    for x in xs {
        match x_labels {
            Some(l) => out.push_str(&l[x as usize]),
            None => out.push_str(&format!("{x}")),
        }
        for s in series {
            out.push(',');
            if let Some(p) = s.points.iter().find(|p| p.0 == x) {
                out.push_str(&format!("{:.6}", p.1));
            }
        }
        out.push('\n');
    }
    out
}

/// Renders `<stem>.svg` and `<stem>_plot.csv` for every sweep table found in
/// `dir`. Returns the files written.
pub fn render_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for kind in [SweepKind::Configs, SweepKind::Theta, SweepKind::Shell] {
        let csv_path = dir.join(format!("{}.csv", kind.file_stem()));
        if !csv_path.exists() {
            continue;
        }
        let rows = read_rows(&csv_path)?;
        let (svg, table) = match kind {
            SweepKind::Configs => {
                let (cats, series) = config_series(&rows);
                (
                    bar_chart("Coverage per configuration", "configuration", &cats, &series),
                    pivot_csv("config", &series, Some(&cats)),
                )
            }
            SweepKind::Theta => {
                let series = theta_series(&rows);
                (line_chart("Coverage against sensor tilt", "tilt θ (deg)", &series), pivot_csv("theta_deg", &series, None))
            }
            SweepKind::Shell => {
                let series = theta_series(&rows);
                (
                    line_chart("Coverage against sensor tilt per shell radius", "tilt θ (deg)", &series),
                    pivot_csv("theta_deg", &series, None),
                )
            }
        };
        for (name, body) in [(format!("{}.svg", kind.file_stem()), svg), (format!("{}_plot.csv", kind.file_stem()), table)] {
            let p = dir.join(name);
            fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
            written.push(p);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(config: &str, vmax: &str, r: &str, z: &str) -> Row {
        Row {
            config: config.into(),
            vmax: vmax.into(),
            r_param: r.into(),
            theta_deg: "0".into(),
            zeta_percent: z.into(),
            lambda_vmax_m3: String::new(),
            lambda_leftover_m3: String::new(),
            voxel_size_m: "0.025".into(),
            max_depth: "8".into(),
            pose_phase: "0.5".into(),
            warnings: String::new(),
            code_version: "x".into(),
        }
    }

    #[test]
    fn bar_chart_has_a_group_per_config_and_a_bar_per_volume() {
        let rows = vec![
            row("n1_8_0", "VO", "1.3000", "10"),
            row("n1_8_0", "VS", "0.9000", "20"),
            row("n1_16_0", "VO", "1.3000", "30"),
            row("n1_16_0", "VS", "0.9000", "40"),
        ];
        let (cats, series) = config_series(&rows);
        assert_eq!(cats, ["n1_8_0", "n1_16_0"]);
        assert_eq!(series.iter().map(|s| s.name.as_str()).collect::<Vec<_>>(), ["VO(1.3)", "VS(0.9)"]);
        let svg = bar_chart("t", "x", &cats, &series);
        assert_eq!(svg.matches("<rect x=").count(), 4 + 1 + series.len());
        assert!(svg.contains(">n1_16_0<") && svg.contains(">VS(0.9)<"));
    }

    #[test]
    fn theta_lines_per_volume() {
        let rows = vec![
            row("n2_16_10", "VS", "0.5000", "30"),
            row("n2_16_0", "VS", "0.5000", "20"),
            row("n2_16_0", "VS", "1.5000", "10"),
            row("n3_16_55", "VS", "0.5000", "90"),
        ];
        let s = theta_series(&rows);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].points, vec![(0.0, 20.0), (10.0, 30.0)]);
        let svg = line_chart("t", "θ", &s);
        assert_eq!(svg.matches("<polyline").count(), 2);
        let table = pivot_csv("theta_deg", &s, None);
        assert_eq!(table.lines().next().unwrap(), "theta_deg,VS(0.5),VS(1.5)");
    }
}
