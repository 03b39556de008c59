//! β(n) charts from report CSV files, written as standalone SVG.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ReportRow {
    pub n: usize,
    pub beta: f64,
    pub stderr: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub rows: Vec<ReportRow>,
}

/// Reads the `n`, `beta`, `stderr` and `pass` columns of a report CSV.
pub fn read_report(text: &str) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows = reader
        .deserialize::<ReportRow>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Format(format!("bad report row: {e}")))?;
    Ok(rows)
}

pub fn load_series(path: &Path) -> Result<Series> {
    let text = std::fs::read_to_string(path)?;
    let rows = read_report(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    if rows.is_empty() {
        return Err(Error::Parameter(format!("{} has no rows", path.display())));
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(Series { label, rows })
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#17becf", "#d62728", "#ff7f0e", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let m = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

/// Renders every series with error bars plus the dashed threshold line.
pub fn render_svg(series: &[Series], beta_star: f64) -> Result<String> {
    let rows = series.iter().flat_map(|s| s.rows.iter());
    if series.is_empty() || series.iter().all(|s| s.rows.is_empty()) {
        return Err(Error::Parameter("nothing to plot: the reports have no rows".into()));
    }
    let finite = |x: f64| if x.is_finite() { x } else { 0.0 };
    let (mut n_min, mut n_max) = (usize::MAX, 0);
    let (mut y_min, mut y_max) = (beta_star.min(0.0), beta_star.max(0.0));
    for r in rows {
        n_min = n_min.min(r.n);
        n_max = n_max.max(r.n);
        if r.beta.is_finite() {
            y_min = y_min.min(r.beta - finite(r.stderr));
            y_max = y_max.max(r.beta + finite(r.stderr));
        }
    }
    let (x0, x1) = (n_min as f64 - 0.5, n_max as f64 + 0.5);
    let pad = 0.05 * (y_max - y_min).max(0.1);
    let (y0, y1) = (y_min - pad, y_max + pad);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
    );

    let xstep = nice_step(x1 - x0, 10).max(1.0);
    let mut t = (x0 / xstep).ceil() * xstep;
    while t <= x1 {
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{yb:.1}" x2="{x:.1}" y2="{yt:.1}" stroke="#333"/><text x="{x:.1}" y="{ty:.1}" text-anchor="middle">{t}</text>"##,
            x = sx(t),
            yb = TOP + ph,
            yt = TOP + ph + 5.0,
            ty = TOP + ph + 20.0
        );
        t += xstep;
    }
    let ystep = nice_step(y1 - y0, 8);
    let mut t = (y0 / ystep).ceil() * ystep;
    while t <= y1 {
        let _ = writeln!(
            svg,
            r##"<line x1="{xa:.1}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}" stroke="#333"/><line x1="{LEFT}" y1="{y:.1}" x2="{xe:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{xt:.1}" y="{yt:.1}" text-anchor="end">{t:.2}</text>"##,
            xa = LEFT - 5.0,
            y = sy(t),
            xe = LEFT + pw,
            xt = LEFT - 8.0,
            yt = sy(t) + 4.0
        );
        t += ystep;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">n</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">β(n)</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    let _ = writeln!(
        svg,
        r##"<line class="threshold" x1="{LEFT}" y1="{y:.1}" x2="{xe:.1}" y2="{y:.1}" stroke="black" stroke-dasharray="8 3 2 3"/>"##,
        y = sy(beta_star),
        xe = LEFT + pw
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts: Vec<&ReportRow> = s.rows.iter().filter(|r| r.beta.is_finite()).collect();
        pts.sort_by_key(|r| r.n);
        let _ = writeln!(svg, r#"<g class="series" fill="{color}" stroke="{color}">"#);
        let path: Vec<String> = pts
            .iter()
            .map(|r| format!("{:.1},{:.1}", sx(r.n as f64), sy(r.beta)))
            .collect();
        let _ = writeln!(svg, r#"<polyline fill="none" points="{}"/>"#, path.join(" "));
        for r in &pts {
            let (x, e) = (sx(r.n as f64), finite(r.stderr));
            let _ = writeln!(
                svg,
                r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}"/><circle cx="{x:.1}" cy="{:.1}" r="3"/>"#,
                sy(r.beta - e),
                sy(r.beta + e),
                sy(r.beta)
            );
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}"/><text x="{:.1}" y="{:.1}" stroke="none" fill="black">{}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    let ly = TOP + 10.0 + 20.0 * series.len() as f64;
    let lx = LEFT + pw + 15.0;
    let _ = writeln!(
        svg,
        r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="black" stroke-dasharray="8 3 2 3"/><text x="{:.1}" y="{:.1}">β★ = {beta_star}</text>"#,
        lx + 20.0,
        lx + 26.0,
        ly + 4.0
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "n,mean_cut,beta,stderr,pass,wall_time_s,graphs,shots,depth,family,lambda\n\
        5,4.1,0.41,0.05,true,1.0,100,2048,1,\"erdos_renyi(0.5)\",0.178\n\
        6,5.9,0.38,0.04,true,1.0,100,2048,1,\"erdos_renyi(0.5)\",0.178\n";

    #[test]
    fn reads_report_columns() {
        let rows = read_report(CSV).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1], ReportRow { n: 6, beta: 0.38, stderr: 0.04, pass: true });
    }

    #[test]
    fn one_series_and_threshold() {
        let s = Series { label: "perfect".into(), rows: read_report(CSV).unwrap() };
        let svg = render_svg(&[s], 0.2).unwrap();
        assert_eq!(svg.matches(r#"class="series""#).count(), 1);
        assert_eq!(svg.matches(r#"class="threshold""#).count(), 1);
        assert!(svg.contains(">perfect<"));
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn two_series_get_two_legend_entries() {
        let a = Series { label: "perfect".into(), rows: read_report(CSV).unwrap() };
        let b = Series { label: "noisy".into(), rows: read_report(CSV).unwrap() };
        let svg = render_svg(&[a, b], 0.2).unwrap();
        assert_eq!(svg.matches(r#"class="series""#).count(), 2);
        assert!(svg.contains(">noisy<"));
    }

    #[test]
    fn empty_input_is_an_error() {
        let header = CSV.lines().next().unwrap();
        let rows = read_report(header).unwrap();
        assert!(rows.is_empty());
        let s = Series { label: "x".into(), rows };
        assert!(matches!(render_svg(&[s], 0.2), Err(Error::Parameter(_))));
        assert!(render_svg(&[], 0.2).is_err());
    }
}
