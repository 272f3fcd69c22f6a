//! Minimal self-contained SVG line charts.

use std::fmt::Write as _;
use std::path::Path;

use super::{write_atomic, Table};
use crate::error::{Error, Result};

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const DASHES: [&str; 3] = ["", "6 4", "2 3"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub series: Vec<Series>,
    pub width: f64,
    pub height: f64,
}

impl LineChart {
    pub fn new(x_label: impl Into<String>, x: Vec<f64>) -> Self {
        Self {
            title: String::new(),
            x_label: x_label.into(),
            y_label: String::new(),
            x,
            series: Vec::new(),
            width: 800.0,
            height: 450.0,
        }
    }

    pub fn title(mut self, title: impl Into<String>) -> Self {
        self.title = title.into();
        self
    }

    pub fn y_label(mut self, label: impl Into<String>) -> Self {
        self.y_label = label.into();
        self
    }

    pub fn series(mut self, label: impl Into<String>, y: Vec<f64>) -> Self {
        self.series.push(Series {
            label: label.into(),
            y,
        });
        self
    }

    fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let mut xr = (f64::INFINITY, f64::NEG_INFINITY);
        let mut yr = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.series {
            for (&x, &y) in self.x.iter().zip(&s.y) {
                if x.is_finite() && y.is_finite() {
                    xr = (xr.0.min(x), xr.1.max(x));
                    yr = (yr.0.min(y), yr.1.max(y));
                }
            }
        }
        (pad_range(xr, 0.0), pad_range(yr, 0.05))
    }

    pub fn to_svg(&self) -> String {
        let (w, h) = (self.width, self.height);
        let (left, right, top, bottom) = (70.0, 20.0, 40.0, 55.0);
        let (pw, ph) = (w - left - right, h - top - bottom);
        let ((x0, x1), (y0, y1)) = self.bounds();
        let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        if !self.title.is_empty() {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
                w / 2.0,
                escape(&self.title)
            );
        }

        for t in ticks(x0, x1) {
            let px = sx(t);
            let _ = writeln!(
                out,
                r##"<line x1="{px:.2}" y1="{top:.2}" x2="{px:.2}" y2="{:.2}" stroke="#e5e5e5"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                top + ph,
                top + ph + 16.0,
                tick_label(t)
            );
        }
        for t in ticks(y0, y1) {
            let py = sy(t);
            let _ = writeln!(
                out,
                r##"<line x1="{left:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#e5e5e5"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                left + pw,
                left - 6.0,
                py + 4.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            out,
            r#"<rect x="{left:.2}" y="{top:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            left + pw / 2.0,
            h - 12.0,
            escape(&self.x_label)
        );
        if !self.y_label.is_empty() {
            let (cx, cy) = (16.0, top + ph / 2.0);
            let _ = writeln!(
                out,
                r#"<text x="{cx:.2}" y="{cy:.2}" text-anchor="middle" transform="rotate(-90 {cx:.2} {cy:.2})">{}</text>"#,
                escape(&self.y_label)
            );
        }

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let dash = DASHES[i % DASHES.len()];
            let mut points = String::new();
            for (&x, &y) in self.x.iter().zip(&s.y) {
                if x.is_finite() && y.is_finite() {
                    let _ = write!(points, "{:.2},{:.2} ", sx(x), sy(y));
                }
            }
            let dash_attr = if dash.is_empty() {
                String::new()
            } else {
                format!(r#" stroke-dasharray="{dash}""#)
            };
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{}"/>"#,
                points.trim_end()
            );
            let ly = top + 16.0 + 16.0 * i as f64;
            let lx = left + pw - 150.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"{dash_attr}/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
                ly - 4.0,
                lx + 24.0,
                ly - 4.0,
                lx + 30.0,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn pad_range((lo, hi): (f64, f64), frac: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        let d = lo.abs().max(1.0) * 0.05;
        return (lo - d, hi + d);
    }
    let pad = (hi - lo) * frac;
    (lo - pad, hi + pad)
}

/// Round-number ticks covering `[lo, hi]`, about five of them.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{:.6}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Chart of `columns` against the table's first column.
pub fn chart_from_table(table: &Table, columns: &[&str]) -> Result<LineChart> {
    if columns.is_empty() {
        return Err(Error::Domain("no columns requested".into()));
    }
    let x_name = table
        .headers
        .first()
        .ok_or_else(|| Error::Domain("table has no columns".into()))?;
    let mut chart = LineChart::new(x_name.clone(), table.columns[0].clone()).y_label(columns.join(", "));
    for c in columns {
        chart = chart.series(*c, table.column(c)?.to_vec());
    }
    Ok(chart)
}

/// Reads `csv_path` and writes an SVG with one polyline per requested column.
pub fn render_plot(csv_path: &Path, columns: &[&str], out_path: &Path) -> Result<()> {
    let table = Table::read(csv_path)?;
    let title = csv_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let svg = chart_from_table(&table, columns)?.title(title).to_svg();
    write_atomic(out_path, svg.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    const CSV: &str = "tau,prob_left,prob_right,energy_total,barrier_height\n0,1,0,0.95,5.59\n0.5,0.9,0.1,1.5,5.59\n1,0.2,0.8,3,5.59\n";

    #[test]
    fn two_series_chart() {
        let t = Table::parse(CSV).unwrap();
        let svg = chart_from_table(&t, &["prob_left", "prob_right"]).unwrap().to_svg();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">prob_left</text>"));
        assert!(svg.contains(">tau</text>"));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn barrier_reference_line() {
        let t = Table::parse(CSV).unwrap();
        let svg = chart_from_table(&t, &["energy_total", "barrier_height"]).unwrap().to_svg();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn missing_column_is_named() {
        let t = Table::parse(CSV).unwrap();
        let err = chart_from_table(&t, &["prob_left", "foo"]).unwrap_err();
        assert!(err.to_string().contains("foo"));
    }

    #[test]
    fn deterministic_file_output() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("ts.csv");
        fs::write(&csv, CSV).unwrap();
        let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
        render_plot(&csv, &["prob_left", "prob_right"], &a).unwrap();
        render_plot(&csv, &["prob_left", "prob_right"], &b).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert!(render_plot(&csv, &["foo"], &dir.path().join("c.svg")).is_err());
    }

    #[test]
    fn tick_choice() {
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(ticks(0.0, 2500.0), vec![0.0, 500.0, 1000.0, 1500.0, 2000.0, 2500.0]);
        assert_eq!(tick_label(0.6000000000000001), "0.6");
        assert_eq!(tick_label(-0.0), "0");
    }
}
